#pragma once

#include <cstddef>
#include <functional>

namespace ddegrowth {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    /// Bisection depth below a seed panel at which we give up.
    int max_depth = 60;
    std::size_t max_panels = 200000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t panels = 0;
};

/// Adaptive integral of f over [a, b], a <= b.
///
/// The interval is first cut into panels of geometrically growing width
/// (1, 1, 2, 4, ... measured from a), which suits the slowly varying
/// integrands that appear after the u = e^v substitution. Panels are then
/// bisected, worst error first, using the Gauss 7 / Kronrod 15 pair; the
/// error estimate is |K15 - G7|. Converged when the summed estimate is at most
/// max(abs_tol, rel_tol * |value|). Throws NumericError (with the worst panel
/// in the message) on a non-finite integrand or when max_depth/max_panels is
/// hit.
[[nodiscard]] QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                                         const QuadratureOptions& options = {});

}  // namespace ddegrowth
