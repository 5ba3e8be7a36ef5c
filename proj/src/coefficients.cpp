#include "ddegrowth/coefficients.hpp"

#include "ddegrowth/numfmt.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddegrowth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

// log of c * x^beta given L = log x, with the x = 0 limit handled.
double log_power(double c, double beta, double L) {
    if (L == -kInf) {
        if (beta > 0.0) {
            return -kInf;
        }
        if (beta == 0.0) {
            return std::log(c);
        }
        throw DomainError("negative power is unbounded at x = 0");
    }
    return std::log(c) + beta * L;
}

}  // namespace

CoefficientSpec CoefficientSpec::zero() { return CoefficientSpec{form::Zero{}}; }

CoefficientSpec CoefficientSpec::constant(double c) {
    require_positive(c, "const: c");
    return CoefficientSpec{form::Constant{c}};
}

CoefficientSpec CoefficientSpec::power(double c, double beta) {
    require_positive(c, "power: c");
    require_finite(beta, "power: beta");
    return CoefficientSpec{form::Power{c, beta}};
}

CoefficientSpec CoefficientSpec::linear(double C) {
    require_positive(C, "linear: C");
    return CoefficientSpec{form::Linear{C}};
}

CoefficientSpec CoefficientSpec::lin_times_exp_log_pow(double c, double alpha) {
    require_positive(c, "xexplogpow: c");
    require_positive(alpha, "xexplogpow: alpha");
    return CoefficientSpec{form::LinTimesExpLogPow{c, alpha}};
}

CoefficientSpec CoefficientSpec::exp_log_pow(double c, double alpha) {
    require_positive(c, "explogpow: c");
    require_positive(alpha, "explogpow: alpha");
    return CoefficientSpec{form::ExpLogPow{c, alpha}};
}

CoefficientSpec CoefficientSpec::power_log(double c, double beta, double gamma) {
    require_positive(c, "powerlog: c");
    require_finite(beta, "powerlog: beta");
    require_finite(gamma, "powerlog: gamma");
    return CoefficientSpec{form::PowerLog{c, beta, gamma}};
}

double CoefficientSpec::domain_threshold() const noexcept {
    return std::visit(overloaded{
                          [](const form::LinTimesExpLogPow&) { return 1.0; },
                          [](const form::ExpLogPow&) { return 1.0; },
                          [](const form::PowerLog& p) { return p.gamma == 0.0 ? 0.0 : 1.0; },
                          [](const auto&) { return 0.0; },
                      },
                      form_);
}

double CoefficientSpec::monotone_from() const noexcept {
    return std::visit(overloaded{
                          [](const form::Power& p) { return p.beta >= 0.0 ? 0.0 : kInf; },
                          [](const form::LinTimesExpLogPow&) { return 1.0; },
                          [](const form::ExpLogPow&) { return 1.0; },
                          [](const form::PowerLog& p) {
                              // d/dL (beta L + gamma log L) = beta + gamma / L
                              if (p.gamma == 0.0) {
                                  return p.beta >= 0.0 ? 0.0 : kInf;
                              }
                              if (p.beta > 0.0) {
                                  return std::exp(std::max(0.0, -p.gamma / p.beta));
                              }
                              if (p.beta == 0.0 && p.gamma > 0.0) {
                                  return 1.0;
                              }
                              return kInf;
                          },
                          [](const auto&) { return 0.0; },
                      },
                      form_);
}

std::optional<double> CoefficientSpec::rv_index() const noexcept {
    return std::visit(overloaded{
                          [](const form::Zero&) -> std::optional<double> { return std::nullopt; },
                          [](const form::Constant&) -> std::optional<double> { return 0.0; },
                          [](const form::Power& p) -> std::optional<double> { return p.beta; },
                          [](const form::Linear&) -> std::optional<double> { return 1.0; },
                          [](const form::LinTimesExpLogPow& p) -> std::optional<double> {
                              if (p.alpha < 1.0) {
                                  return 1.0;
                              }
                              if (p.alpha == 1.0) {
                                  return 2.0;
                              }
                              return std::nullopt;
                          },
                          [](const form::ExpLogPow& p) -> std::optional<double> {
                              if (p.alpha < 1.0) {
                                  return 0.0;
                              }
                              if (p.alpha == 1.0) {
                                  return 1.0;
                              }
                              return std::nullopt;
                          },
                          [](const form::PowerLog& p) -> std::optional<double> { return p.beta; },
                      },
                      form_);
}

bool CoefficientSpec::in_domain(LogReal u) const noexcept {
    const double L = u.log_value();
    if (std::isnan(L)) {
        return false;
    }
    return std::visit(overloaded{
                          [&](const form::Power& p) { return L > -kInf || p.beta >= 0.0; },
                          [&](const form::LinTimesExpLogPow&) { return L >= 0.0; },
                          [&](const form::ExpLogPow&) { return L >= 0.0; },
                          [&](const form::PowerLog& p) {
                              if (p.gamma == 0.0) {
                                  return L > -kInf || p.beta >= 0.0;
                              }
                              return L > 0.0;
                          },
                          [](const auto&) { return true; },
                      },
                      form_);
}

LogReal CoefficientSpec::eval_log(LogReal u) const {
    if (!in_domain(u)) {
        throw DomainError(to_string() + ": log-argument " + format_double(u.log_value()) +
                          " is outside the domain");
    }
    const double L = u.log_value();
    const double out = std::visit(
        overloaded{
            [](const form::Zero&) { return -kInf; },
            [](const form::Constant& p) { return std::log(p.c); },
            [&](const form::Power& p) { return log_power(p.c, p.beta, L); },
            [&](const form::Linear& p) { return std::log(p.C) + L; },
            [&](const form::LinTimesExpLogPow& p) { return std::log(p.c) + L + std::pow(L, p.alpha); },
            [&](const form::ExpLogPow& p) { return std::log(p.c) + std::pow(L, p.alpha); },
            [&](const form::PowerLog& p) {
                if (p.gamma == 0.0) {
                    return log_power(p.c, p.beta, L);
                }
                return std::log(p.c) + p.beta * L + p.gamma * std::log(L);
            },
        },
        form_);
    return LogReal::from_log(out);
}

double CoefficientSpec::eval(double x) const {
    if (!(x >= 0.0) || !in_domain(LogReal::from_value(x))) {
        throw DomainError(to_string() + ": argument " + format_double(x) + " is outside the domain");
    }
    return std::visit(overloaded{
                          [](const form::Zero&) { return 0.0; },
                          [](const form::Constant& p) { return p.c; },
                          [&](const form::Power& p) { return p.c * std::pow(x, p.beta); },
                          [&](const form::Linear& p) { return p.C * x; },
                          [&](const form::LinTimesExpLogPow& p) {
                              return p.c * x * std::exp(std::pow(std::log(x), p.alpha));
                          },
                          [&](const form::ExpLogPow& p) { return p.c * std::exp(std::pow(std::log(x), p.alpha)); },
                          [&](const form::PowerLog& p) {
                              if (p.gamma == 0.0) {
                                  return p.c * std::pow(x, p.beta);
                              }
                              return p.c * std::pow(x, p.beta) * std::pow(std::log(x), p.gamma);
                          },
                      },
                      form_);
}

std::string CoefficientSpec::to_string() const {
    const auto f = [](double v) { return format_double(v); };
    return std::visit(overloaded{
                          [](const form::Zero&) { return std::string("zero"); },
                          [&](const form::Constant& p) { return "const(" + f(p.c) + ")"; },
                          [&](const form::Power& p) { return "power(" + f(p.c) + "," + f(p.beta) + ")"; },
                          [&](const form::Linear& p) { return "linear(" + f(p.C) + ")"; },
                          [&](const form::LinTimesExpLogPow& p) {
                              return "xexplogpow(" + f(p.c) + "," + f(p.alpha) + ")";
                          },
                          [&](const form::ExpLogPow& p) { return "explogpow(" + f(p.c) + "," + f(p.alpha) + ")"; },
                          [&](const form::PowerLog& p) {
                              return "powerlog(" + f(p.c) + "," + f(p.beta) + "," + f(p.gamma) + ")";
                          },
                      },
                      form_);
}

CoefficientSpec parse_coefficient(std::string_view text) {
    std::string s;
    s.reserve(text.size());
    for (char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch))) {
            s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    if (s == "zero") {
        return CoefficientSpec::zero();
    }
    const auto open = s.find('(');
    if (open == std::string::npos || s.back() != ')') {
        throw std::invalid_argument("malformed coefficient '" + std::string(text) + "'");
    }
    const std::string name = s.substr(0, open);
    const std::string body = s.substr(open + 1, s.size() - open - 2);

    std::vector<double> args;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        const auto comma = std::min(body.find(',', pos), body.size());
        const std::string_view tok(body.data() + pos, comma - pos);
        double v = 0.0;
        auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc{} || end != tok.data() + tok.size()) {
            throw std::invalid_argument("bad number '" + std::string(tok) + "' in '" + std::string(text) + "'");
        }
        args.push_back(v);
        pos = comma + 1;
    }

    const auto want = [&](std::size_t n) {
        if (args.size() != n) {
            throw std::invalid_argument(name + " takes " + std::to_string(n) + " parameter(s), got " +
                                        std::to_string(args.size()));
        }
    };
    if (name == "const") {
        want(1);
        return CoefficientSpec::constant(args[0]);
    }
    if (name == "linear") {
        want(1);
        return CoefficientSpec::linear(args[0]);
    }
    if (name == "power") {
        want(2);
        return CoefficientSpec::power(args[0], args[1]);
    }
    if (name == "xexplogpow") {
        want(2);
        return CoefficientSpec::lin_times_exp_log_pow(args[0], args[1]);
    }
    if (name == "explogpow") {
        want(2);
        return CoefficientSpec::exp_log_pow(args[0], args[1]);
    }
    if (name == "powerlog") {
        want(3);
        return CoefficientSpec::power_log(args[0], args[1], args[2]);
    }
    throw std::invalid_argument("unknown coefficient form '" + name + "'");
}

std::string Regime::to_string() const {
    switch (kind) {
        case Kind::SublinearRV: return "SublinearRV(beta=" + format_double(parameter) + ")";
        case Kind::LinearRV: return "LinearRV(C=" + format_double(parameter) + ")";
        case Kind::RV1Superlinear: return "RV1Superlinear";
        case Kind::PolySuperlinear: return "PolySuperlinear(beta=" + format_double(parameter) + ")";
        case Kind::FasterThanPoly: return "FasterThanPoly(alpha=" + format_double(parameter) + ")";
        case Kind::Unsupported: return "Unsupported";
    }
    return "Unsupported";
}

Regime classify_regime(const CoefficientSpec& g) {
    using K = Regime::Kind;
    return std::visit(overloaded{
                          [](const form::Zero&) -> Regime {
                              throw DomainError("g must be positive; zero violates the positivity requirement");
                          },
                          [](const form::Constant&) { return Regime{K::SublinearRV, 0.0}; },
                          [](const form::Power& p) {
                              if (p.beta < 1.0) {
                                  return Regime{K::SublinearRV, p.beta};
                              }
                              if (p.beta == 1.0) {
                                  return Regime{K::LinearRV, p.c};
                              }
                              return Regime{K::PolySuperlinear, p.beta};
                          },
                          [](const form::Linear& p) { return Regime{K::LinearRV, p.C}; },
                          [](const form::LinTimesExpLogPow& p) {
                              return p.alpha < 1.0 ? Regime{K::RV1Superlinear, 0.0} : Regime{};
                          },
                          [](const form::ExpLogPow& p) {
                              return p.alpha > 1.0 ? Regime{K::FasterThanPoly, p.alpha} : Regime{};
                          },
                          [](const form::PowerLog& p) {
                              if (p.beta == 1.0 && p.gamma > 0.0) {
                                  return Regime{K::RV1Superlinear, 0.0};
                              }
                              if (p.beta > 1.0) {
                                  return Regime{K::PolySuperlinear, p.beta};
                              }
                              return Regime{};
                          },
                      },
                      g.form());
}

LogExpr as_expr(const CoefficientSpec& spec) {
    return LogExpr(spec.to_string(), [spec](double L) {
        try {
            return spec.eval_log(LogReal::from_log(L)).log_value();
        } catch (const DomainError&) {
            return kNaN;
        }
    });
}

LogExpr identity_expr() {
    return LogExpr("x", [](double L) { return L; });
}

LogExpr x_log_x_expr() {
    return LogExpr("x*log(x)", [](double L) { return L > 0.0 ? L + std::log(L) : kNaN; });
}

LogExpr x_log_ratio_expr(const CoefficientSpec& g) {
    return LogExpr("x*log(g(x)/x)", [g](double L) {
        try {
            const double w = g.eval_log(LogReal::from_log(L)).log_value() - L;
            return w > 0.0 ? L + std::log(w) : kNaN;
        } catch (const DomainError&) {
            return kNaN;
        }
    });
}

std::string LimitVerdict::to_string() const {
    switch (kind) {
        case Kind::Zero: return "Zero";
        case Kind::Finite: return "Finite(" + format_double(value) + ")";
        case Kind::Infinite: return "Infinite";
        case Kind::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

LimitVerdict limit_probe(const LogExpr& numerator, const LogExpr& denominator, std::span<const double> scales,
                         const ProbeThresholds& thresholds) {
    if (scales.size() < 4) {
        throw DomainError("limit_probe needs at least four scales");
    }
    for (std::size_t i = 1; i < scales.size(); ++i) {
        if (!(scales[i] > scales[i - 1])) {
            throw DomainError("limit_probe scales must be strictly increasing");
        }
    }

    LimitVerdict out;
    bool numerator_zero = true;
    for (double s : scales) {
        const double num = numerator(s);
        const double den = denominator(s);
        if (std::isnan(num) || std::isnan(den) || den == -kInf) {
            throw DomainError(numerator.label() + " / " + denominator.label() + " is not evaluable at log x = " +
                              format_double(s));
        }
        numerator_zero = numerator_zero && num == -kInf;
        out.log_ratios.push_back(num - den);
    }

    if (numerator_zero) {
        out.kind = LimitVerdict::Kind::Zero;
        out.value = 0.0;
        return out;
    }

    const auto& r = out.log_ratios;
    bool decreasing = true;
    bool increasing = true;
    for (std::size_t i = 1; i < r.size(); ++i) {
        decreasing = decreasing && r[i] < r[i - 1];
        increasing = increasing && r[i] > r[i - 1];
    }
    const double last = r.back();
    if (decreasing && last < -thresholds.decisive_log) {
        out.kind = LimitVerdict::Kind::Zero;
        out.value = 0.0;
        return out;
    }
    if (increasing && last > thresholds.decisive_log) {
        out.kind = LimitVerdict::Kind::Infinite;
        out.value = kInf;
        return out;
    }
    const auto tail = std::span<const double>(r).last(3);
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    if (*hi - *lo <= thresholds.finite_tolerance) {
        out.kind = LimitVerdict::Kind::Finite;
        out.value = std::exp(last);
        return out;
    }
    out.kind = LimitVerdict::Kind::Inconclusive;
    out.value = kNaN;
    return out;
}

}  // namespace ddegrowth
