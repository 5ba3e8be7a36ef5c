#pragma once

// Positive reals carried by their natural logarithm. Trajectories of the
// superlinear regimes reach values like exp(exp(400)), so every recursion and
// functional in this project works on log x rather than x.

#include "ddegrowth/errors.hpp"

#include <cmath>
#include <compare>
#include <limits>

namespace ddegrowth {

/// Largest log-value the simulator accepts before declaring the horizon
/// exceeded.
inline constexpr double kMaxLogValue = 1e308;

class LogReal {
public:
    /// Bottom element: represents exactly 0 and is stored as -inf.
    constexpr LogReal() noexcept = default;

    [[nodiscard]] static constexpr LogReal zero() noexcept { return LogReal{}; }

    [[nodiscard]] static constexpr LogReal from_log(double log_value) noexcept {
        LogReal r;
        r.log_ = log_value;
        return r;
    }

    /// x must be >= 0.
    [[nodiscard]] static LogReal from_value(double x) {
        if (!(x >= 0.0)) {
            throw DomainError("LogReal cannot represent a negative or NaN value");
        }
        return from_log(std::log(x));
    }

    [[nodiscard]] constexpr double log_value() const noexcept { return log_; }
    [[nodiscard]] constexpr bool is_zero() const noexcept {
        return log_ == -std::numeric_limits<double>::infinity();
    }

    /// Represented value; +inf once it leaves the double range.
    [[nodiscard]] double value() const noexcept { return std::exp(log_); }

    /// The horizon-exceeded signal of the overflow policy.
    [[nodiscard]] constexpr bool exceeds_horizon() const noexcept { return log_ > kMaxLogValue; }

    friend constexpr auto operator<=>(LogReal a, LogReal b) noexcept { return a.log_ <=> b.log_; }
    friend constexpr bool operator==(LogReal a, LogReal b) noexcept { return a.log_ == b.log_; }

private:
    double log_ = -std::numeric_limits<double>::infinity();
};

/// log(e^a + e^b) as max + log1p(exp(min - max)); exact when either side is bottom.
[[nodiscard]] inline LogReal log_add(LogReal a, LogReal b) noexcept {
    if (a.is_zero()) {
        return b;
    }
    if (b.is_zero()) {
        return a;
    }
    const double hi = a.log_value() > b.log_value() ? a.log_value() : b.log_value();
    const double lo = a.log_value() > b.log_value() ? b.log_value() : a.log_value();
    if (std::isinf(hi)) {
        return LogReal::from_log(hi);
    }
    return LogReal::from_log(hi + std::log1p(std::exp(lo - hi)));
}

/// c * a for c > 0.
[[nodiscard]] inline LogReal log_scale(LogReal a, double c) {
    if (!(c > 0.0)) {
        throw DomainError("log_scale requires a positive factor");
    }
    if (a.is_zero()) {
        return a;
    }
    return LogReal::from_log(a.log_value() + std::log(c));
}

}  // namespace ddegrowth
