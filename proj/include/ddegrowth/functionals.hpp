#pragma once

// Growth functionals: monotone integrals whose composition with a solution
// grows linearly in time.
//
//   GammaOfPhi   Gamma(x) = int_lower^x du / phi(u)
//   BigG         G(x)     = int_1^x du / (u log(1 + g(u)/u))
//   SublinearH   H(x)     = int_1^x du / g(u)
//   IteratedLog  Gamma(x) = int_lower^x du / phi_d(u),
//                phi_d(u) = (1+u) log(1+u) log_2(1+u) ... log_{d-1}(1+u)
//
// Every value is carried as a plain double; arguments arrive as log x. A
// scale c turns Gamma into Gamma_c = Gamma / c.

#include "ddegrowth/coefficients.hpp"
#include "ddegrowth/logreal.hpp"
#include "ddegrowth/quadrature.hpp"

#include <optional>
#include <string>

namespace ddegrowth {

class GrowthFunctional {
public:
    enum class Kind { GammaOfPhi, BigG, SublinearH, IteratedLog };

    /// lower must be positive and strictly inside phi's domain.
    [[nodiscard]] static GrowthFunctional gamma_of_phi(CoefficientSpec phi, double lower);
    /// Lower limit max(psi_star, domain threshold of phi, e).
    [[nodiscard]] static GrowthFunctional gamma_of_phi_from(CoefficientSpec phi, double psi_star);
    [[nodiscard]] static GrowthFunctional big_g(CoefficientSpec g);
    [[nodiscard]] static GrowthFunctional sublinear_h(CoefficientSpec g);
    /// depth >= 1; log_{depth-1}(1 + lower) must be positive.
    [[nodiscard]] static GrowthFunctional iterated_log(int depth, double lower);

    /// Gamma_c = Gamma / c, composing with any existing scale.
    [[nodiscard]] GrowthFunctional scaled(double c) const;

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const CoefficientSpec& coefficient() const noexcept { return coefficient_; }
    [[nodiscard]] int depth() const noexcept { return depth_; }
    [[nodiscard]] double lower() const noexcept { return lower_; }
    [[nodiscard]] double lower_log() const noexcept { return lower_log_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }
    [[nodiscard]] std::string describe() const;

    /// log phi(e^v), where phi is the denominator of the integrand in u.
    [[nodiscard]] double log_phi(double v) const;
    /// Integrand after u = e^v, i.e. e^v / phi(e^v), unscaled.
    [[nodiscard]] double integrand(double v) const;

    /// Value at x (x >= lower). Closed form when the variant has one,
    /// otherwise adaptive quadrature in v = log u. May return +inf when the
    /// value itself leaves the double range.
    [[nodiscard]] double evaluate(LogReal x) const;
    [[nodiscard]] std::optional<double> closed_form(LogReal x) const;
    [[nodiscard]] double quadrature(LogReal x, const QuadratureOptions& options = {}) const;

    /// x with |evaluate(x) - y| <= 1e-9 (1 + |y|), by bisection on log x with
    /// doubling bracket expansion. Throws HorizonError past log x = 1e300 and
    /// PreconditionError when the functional is bounded.
    [[nodiscard]] LogReal invert(double y) const;

    /// lim_{x -> inf} value = +inf, decided analytically per catalog form.
    [[nodiscard]] bool diverges() const;

private:
    GrowthFunctional(Kind kind, CoefficientSpec coefficient, int depth, double lower);

    void check_argument(LogReal x) const;
    [[nodiscard]] double unscaled(LogReal x) const;

    Kind kind_;
    CoefficientSpec coefficient_;
    int depth_ = 0;
    double lower_;
    double lower_log_;
    double scale_ = 1.0;
};

/// int^inf du / phi(u) = +inf for a catalog form; true for zero, matching the
/// convention that f = 0 admits no finite-time explosion.
[[nodiscard]] bool reciprocal_integral_diverges(const CoefficientSpec& phi);

/// log(1 + e^v) without overflow.
[[nodiscard]] double softplus(double v) noexcept;

}  // namespace ddegrowth
