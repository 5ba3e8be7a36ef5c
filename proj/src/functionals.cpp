#include "ddegrowth/functionals.hpp"

#include "ddegrowth/errors.hpp"
#include "ddegrowth/numfmt.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ddegrowth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxBracketLog = 1e300;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// int_{z0}^{z1} s^{p-1} e^{-s} ds for 0 <= z0 <= z1, p > 0. Uses whichever
// incomplete gamma keeps the difference away from cancellation.
double gamma_segment(double p, double z0, double z1) {
    if (z0 == z1) {
        return 0.0;
    }
    if (z0 > p) {
        return boost::math::tgamma(p, z0) - boost::math::tgamma(p, z1);
    }
    return boost::math::tgamma_lower(p, z1) - boost::math::tgamma_lower(p, z0);
}

// int_{l0}^{L} e^{a v} dv / c, a = 1 - beta.
double power_closed(double c, double beta, double l0, double L) {
    const double a = 1.0 - beta;
    if (a == 0.0) {
        return (L - l0) / c;
    }
    return std::exp(a * l0) * std::expm1(a * (L - l0)) / (a * c);
}

// int_{l0}^{L} e^{a v} v^{-gamma} dv / c for the cases with a closed form.
std::optional<double> power_log_closed(const form::PowerLog& p, double l0, double L) {
    if (p.gamma == 0.0) {
        return power_closed(p.c, p.beta, l0, L);
    }
    const double a = 1.0 - p.beta;
    if (a == 0.0) {
        if (p.gamma == 1.0) {
            return (std::log(L) - std::log(l0)) / p.c;
        }
        const double q = 1.0 - p.gamma;
        return (std::pow(L, q) - std::pow(l0, q)) / (q * p.c);
    }
    if (p.gamma == 1.0) {
        return (std::expint(a * L) - std::expint(a * l0)) / p.c;
    }
    if (p.gamma == -1.0) {
        const auto antideriv = [a](double v) { return std::exp(a * v) * (v / a - 1.0 / (a * a)); };
        return (antideriv(L) - antideriv(l0)) / p.c;
    }
    if (a < 0.0 && p.gamma < 1.0) {
        const double s = -a;
        return std::pow(s, p.gamma - 1.0) * gamma_segment(1.0 - p.gamma, s * l0, s * L) / p.c;
    }
    return std::nullopt;
}

// Closed form of int_{l0}^{L} e^v / phi(e^v) dv for a catalog phi.
std::optional<double> catalog_closed(const CoefficientSpec& phi, double l0, double L) {
    return std::visit(
        overloaded{
            [](const form::Zero&) -> std::optional<double> { return std::nullopt; },
            [&](const form::Constant& p) -> std::optional<double> { return power_closed(p.c, 0.0, l0, L); },
            [&](const form::Power& p) -> std::optional<double> { return power_closed(p.c, p.beta, l0, L); },
            [&](const form::Linear& p) -> std::optional<double> { return (L - l0) / p.C; },
            [&](const form::LinTimesExpLogPow& p) -> std::optional<double> {
                // s = v^alpha turns int e^{-v^alpha} dv into an incomplete gamma.
                const double k = 1.0 / p.alpha;
                return k * gamma_segment(k, std::pow(l0, p.alpha), std::pow(L, p.alpha)) / p.c;
            },
            [&](const form::ExpLogPow& p) -> std::optional<double> {
                if (p.alpha == 1.0) {
                    return (L - l0) / p.c;
                }
                if (p.alpha == 2.0) {
                    // e^{v - v^2} = e^{1/4} e^{-(v - 1/2)^2}
                    return std::exp(0.25) * 0.5 * std::sqrt(std::numbers::pi) *
                           (std::erfc(l0 - 0.5) - std::erfc(L - 0.5)) / p.c;
                }
                return std::nullopt;
            },
            [&](const form::PowerLog& p) -> std::optional<double> { return power_log_closed(p, l0, L); },
        },
        phi.form());
}

// log_k(1 + e^v) for k = 1..depth; log_1 = softplus.
double log_k_softplus(int k, double v) {
    double out = softplus(v);
    for (int i = 1; i < k; ++i) {
        out = std::log(out);
    }
    return out;
}

bool catalog_gamma_diverges(const CoefficientSpec& phi) {
    return std::visit(overloaded{
                          [](const form::Zero&) { return false; },
                          [](const form::Constant&) { return true; },
                          [](const form::Power& p) { return p.beta <= 1.0; },
                          [](const form::Linear&) { return true; },
                          [](const form::LinTimesExpLogPow&) { return false; },
                          [](const form::ExpLogPow& p) { return p.alpha <= 1.0; },
                          [](const form::PowerLog& p) {
                              if (p.beta != 1.0) {
                                  return p.beta < 1.0;
                              }
                              return p.gamma <= 1.0;
                          },
                      },
                      phi.form());
}

void require_positive_at(const CoefficientSpec& phi, double lower) {
    const LogReal at = LogReal::from_log(std::log(lower));
    if (!phi.in_domain(at) || !std::isfinite(phi.eval_log(at).log_value())) {
        throw DomainError(phi.to_string() + " is not positive and finite at the lower limit " +
                          format_double(lower));
    }
}

}  // namespace

double softplus(double v) noexcept {
    if (v > 0.0) {
        return v + std::log1p(std::exp(-v));
    }
    return std::log1p(std::exp(v));
}

GrowthFunctional::GrowthFunctional(Kind kind, CoefficientSpec coefficient, int depth, double lower)
    : kind_(kind), coefficient_(std::move(coefficient)), depth_(depth), lower_(lower), lower_log_(std::log(lower)) {}

GrowthFunctional GrowthFunctional::gamma_of_phi(CoefficientSpec phi, double lower) {
    if (phi.is_zero()) {
        throw DomainError("Gamma needs a positive phi, got zero");
    }
    if (!(lower > 0.0) || !std::isfinite(lower)) {
        throw DomainError("Gamma lower limit must be positive and finite");
    }
    require_positive_at(phi, lower);
    return GrowthFunctional(Kind::GammaOfPhi, std::move(phi), 0, lower);
}

GrowthFunctional GrowthFunctional::gamma_of_phi_from(CoefficientSpec phi, double psi_star) {
    const double lower = std::max({psi_star, phi.domain_threshold(), std::numbers::e});
    return gamma_of_phi(std::move(phi), lower);
}

GrowthFunctional GrowthFunctional::big_g(CoefficientSpec g) {
    if (g.is_zero()) {
        throw DomainError("G needs a positive g, got zero");
    }
    // Forms such as x (log x)^gamma vanish at u = 1; start those at e instead.
    const LogReal one = LogReal::from_log(0.0);
    const bool positive_at_one = g.in_domain(one) && std::isfinite(g.eval_log(one).log_value());
    const double lower = positive_at_one ? 1.0 : std::numbers::e;
    require_positive_at(g, lower);
    return GrowthFunctional(Kind::BigG, std::move(g), 0, lower);
}

GrowthFunctional GrowthFunctional::sublinear_h(CoefficientSpec g) {
    if (g.is_zero()) {
        throw DomainError("H needs a positive g, got zero");
    }
    require_positive_at(g, 1.0);
    return GrowthFunctional(Kind::SublinearH, std::move(g), 0, 1.0);
}

GrowthFunctional GrowthFunctional::iterated_log(int depth, double lower) {
    if (depth < 1) {
        throw DomainError("iterated-log functional needs depth >= 1");
    }
    if (!(lower > 0.0) || !std::isfinite(lower)) {
        throw DomainError("iterated-log lower limit must be positive and finite");
    }
    if (depth > 1 && !(log_k_softplus(depth - 1, std::log(lower)) > 0.0)) {
        throw DomainError("iterated-log phi is not positive at the lower limit " + format_double(lower));
    }
    return GrowthFunctional(Kind::IteratedLog, CoefficientSpec::zero(), depth, lower);
}

GrowthFunctional GrowthFunctional::scaled(double c) const {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw DomainError("functional scale must be positive and finite");
    }
    GrowthFunctional out = *this;
    out.scale_ *= c;
    return out;
}

std::string GrowthFunctional::describe() const {
    std::string out;
    switch (kind_) {
        case Kind::GammaOfPhi:
            out = "Gamma(x) = int_" + format_double(lower_) + "^x du/phi(u), phi = " + coefficient_.to_string();
            break;
        case Kind::BigG:
            out = "G(x) = int_" + format_double(lower_) + "^x du/(u log(1 + g(u)/u)), g = " + coefficient_.to_string();
            break;
        case Kind::SublinearH: out = "H(x) = int_1^x du/g(u), g = " + coefficient_.to_string(); break;
        case Kind::IteratedLog:
            out = "Gamma(x) = log_" + std::to_string(depth_) + "(1+x) - log_" + std::to_string(depth_) + "(1+" +
                  format_double(lower_) + ")";
            break;
    }
    if (scale_ != 1.0) {
        out += ", scaled by 1/" + format_double(scale_);
    }
    return out;
}

double GrowthFunctional::log_phi(double v) const {
    switch (kind_) {
        case Kind::GammaOfPhi:
        case Kind::SublinearH: return coefficient_.eval_log(LogReal::from_log(v)).log_value();
        case Kind::BigG: {
            const double w = coefficient_.eval_log(LogReal::from_log(v)).log_value() - v;
            return v + std::log(softplus(w));
        }
        case Kind::IteratedLog: {
            // log phi_d = l_1 + l_2 + ... + l_d with l_{k+1} = log l_k
            double l = softplus(v);
            double sum = 0.0;
            for (int k = 1; k <= depth_; ++k) {
                sum += l;
                if (k < depth_) {
                    l = std::log(l);
                }
            }
            return sum;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double GrowthFunctional::integrand(double v) const {
    if (kind_ == Kind::BigG) {
        const double w = coefficient_.eval_log(LogReal::from_log(v)).log_value() - v;
        return 1.0 / softplus(w);
    }
    return std::exp(v - log_phi(v));
}

void GrowthFunctional::check_argument(LogReal x) const {
    if (std::isnan(x.log_value()) || x.log_value() < lower_log_) {
        throw DomainError(describe() + ": argument log x = " + format_double(x.log_value()) +
                          " is below the lower limit");
    }
}

std::optional<double> GrowthFunctional::closed_form(LogReal x) const {
    check_argument(x);
    const double L = x.log_value();
    if (L == lower_log_) {
        return 0.0;
    }
    std::optional<double> out;
    switch (kind_) {
        case Kind::GammaOfPhi:
        case Kind::SublinearH: out = catalog_closed(coefficient_, lower_log_, L); break;
        case Kind::BigG:
            std::visit(overloaded{
                           [&](const form::Linear& p) { out = (L - lower_log_) / std::log1p(p.C); },
                           [&](const form::Power& p) {
                               if (p.beta == 1.0) {
                                   out = (L - lower_log_) / std::log1p(p.c);
                               }
                           },
                           [](const auto&) {},
                       },
                       coefficient_.form());
            break;
        case Kind::IteratedLog: out = log_k_softplus(depth_, L) - log_k_softplus(depth_, lower_log_); break;
    }
    if (out) {
        *out /= scale_;
    }
    return out;
}

double GrowthFunctional::quadrature(LogReal x, const QuadratureOptions& options) const {
    check_argument(x);
    const double L = x.log_value();
    if (!std::isfinite(L)) {
        return kInf;
    }
    const auto f = [this](double v) { return integrand(v); };
    return integrate(f, lower_log_, L, options).value / scale_;
}

double GrowthFunctional::evaluate(LogReal x) const {
    if (auto closed = closed_form(x)) {
        return *closed;
    }
    return quadrature(x);
}

double GrowthFunctional::unscaled(LogReal x) const { return evaluate(x) * scale_; }

LogReal GrowthFunctional::invert(double y) const {
    if (!(y >= 0.0) || !std::isfinite(y)) {
        throw DomainError("invert needs a finite y >= 0");
    }
    if (!diverges()) {
        throw PreconditionError(describe() + " is bounded, so its inverse is not defined everywhere");
    }
    const double target = y * scale_;
    if (target == 0.0) {
        return LogReal::from_log(lower_log_);
    }
    const auto value_at = [this](double L) { return unscaled(LogReal::from_log(L)); };

    double lo = lower_log_;
    double width = 1.0;
    double hi = lower_log_ + width;
    while (value_at(hi) < target) {
        lo = hi;
        width *= 2.0;
        hi = lower_log_ + width;
        if (hi > kMaxBracketLog) {
            throw HorizonError("invert: bracket for y = " + format_double(y) + " exceeds log x = 1e300");
        }
    }
    // Bisect down to adjacent doubles so the log-argument is as tight as the
    // representation allows, not merely within the value tolerance.
    for (int iter = 0; iter < 4000; ++iter) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (value_at(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double err_lo = std::abs(value_at(lo) - target);
    const double err_hi = std::abs(value_at(hi) - target);
    return LogReal::from_log(err_lo <= err_hi ? lo : hi);
}

bool reciprocal_integral_diverges(const CoefficientSpec& phi) {
    return phi.is_zero() || catalog_gamma_diverges(phi);
}

bool GrowthFunctional::diverges() const {
    switch (kind_) {
        case Kind::GammaOfPhi:
        case Kind::SublinearH: return catalog_gamma_diverges(coefficient_);
        case Kind::BigG:
            // log(1 + g/u) grows like (log u)^alpha for these two forms;
            // int dv / v^alpha converges once alpha > 1.
            return std::visit(overloaded{
                                  [](const form::LinTimesExpLogPow& p) { return p.alpha <= 1.0; },
                                  [](const form::ExpLogPow& p) { return p.alpha <= 1.0; },
                                  [](const auto&) { return true; },
                              },
                              coefficient_.form());
        case Kind::IteratedLog: return true;
    }
    return false;
}

}  // namespace ddegrowth
