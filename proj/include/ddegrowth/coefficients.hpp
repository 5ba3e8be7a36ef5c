#pragma once

// Closed catalog of the nonlinearities f and g. Every form has an analytic
// log-domain evaluation (log F as a function of log x), which is what lets the
// simulator run far past the double range of x itself.

#include "ddegrowth/logreal.hpp"

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ddegrowth {

namespace form {
struct Zero {};
struct Constant {
    double c;
};
/// c * x^beta
struct Power {
    double c;
    double beta;
};
/// C * x
struct Linear {
    double C;
};
/// c * x * exp((log x)^alpha)
struct LinTimesExpLogPow {
    double c;
    double alpha;
};
/// c * exp((log x)^alpha)
struct ExpLogPow {
    double c;
    double alpha;
};
/// c * x^beta * (log x)^gamma
struct PowerLog {
    double c;
    double beta;
    double gamma;
};
}  // namespace form

using CoefficientForm = std::variant<form::Zero, form::Constant, form::Power, form::Linear,
                                     form::LinTimesExpLogPow, form::ExpLogPow, form::PowerLog>;

class CoefficientSpec {
public:
    /// Defaults to the zero function.
    CoefficientSpec() = default;

    [[nodiscard]] static CoefficientSpec zero();
    [[nodiscard]] static CoefficientSpec constant(double c);
    [[nodiscard]] static CoefficientSpec power(double c, double beta);
    [[nodiscard]] static CoefficientSpec linear(double C);
    [[nodiscard]] static CoefficientSpec lin_times_exp_log_pow(double c, double alpha);
    [[nodiscard]] static CoefficientSpec exp_log_pow(double c, double alpha);
    [[nodiscard]] static CoefficientSpec power_log(double c, double beta, double gamma);

    [[nodiscard]] const CoefficientForm& form() const noexcept { return form_; }
    [[nodiscard]] bool is_zero() const noexcept { return std::holds_alternative<form::Zero>(form_); }

    /// x0: the form is positive and continuous on (x0, inf).
    [[nodiscard]] double domain_threshold() const noexcept;
    /// Nondecreasing on [monotone_from, inf); +inf when the form never is.
    [[nodiscard]] double monotone_from() const noexcept;
    /// Regular-variation index, when the form is regularly varying.
    [[nodiscard]] std::optional<double> rv_index() const noexcept;

    [[nodiscard]] bool in_domain(LogReal u) const noexcept;

    /// log F(x) given u = log x. Throws DomainError below the domain threshold.
    [[nodiscard]] LogReal eval_log(LogReal u) const;
    /// F(x) in native doubles.
    [[nodiscard]] double eval(double x) const;

    /// Canonical config syntax, e.g. "power(1,0.5)".
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const CoefficientSpec& a, const CoefficientSpec& b) {
        return a.to_string() == b.to_string();
    }

private:
    explicit CoefficientSpec(CoefficientForm f) : form_(f) {}
    CoefficientForm form_ = form::Zero{};
};

/// Parses `power(c,beta)`, `linear(C)`, `xexplogpow(c,alpha)`,
/// `explogpow(c,alpha)`, `powerlog(c,beta,gamma)`, `const(c)`, `zero`
/// (case-insensitive). Throws std::invalid_argument on malformed text and
/// DomainError on out-of-range parameters.
[[nodiscard]] CoefficientSpec parse_coefficient(std::string_view text);

struct Regime {
    enum class Kind { SublinearRV, LinearRV, RV1Superlinear, PolySuperlinear, FasterThanPoly, Unsupported };

    Kind kind = Kind::Unsupported;
    /// beta for SublinearRV/PolySuperlinear, C for LinearRV, alpha for
    /// FasterThanPoly; unused otherwise.
    double parameter = 0.0;

    [[nodiscard]] std::string to_string() const;
    friend bool operator==(const Regime&, const Regime&) = default;
};

/// Pure function of the form and its parameters. Zero g throws DomainError.
[[nodiscard]] Regime classify_regime(const CoefficientSpec& g);

// ---------------------------------------------------------------------------
// Limit probes
// ---------------------------------------------------------------------------

/// An expression evaluable in the log domain: maps log x to log E(x).
/// -inf means E(x) = 0; NaN means "not evaluable here".
class LogExpr {
public:
    LogExpr(std::string label, std::function<double(double)> log_eval)
        : label_(std::move(label)), eval_(std::move(log_eval)) {}

    [[nodiscard]] double operator()(double log_x) const { return eval_(log_x); }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

private:
    std::string label_;
    std::function<double(double)> eval_;
};

[[nodiscard]] LogExpr as_expr(const CoefficientSpec& spec);
/// x
[[nodiscard]] LogExpr identity_expr();
/// x log x
[[nodiscard]] LogExpr x_log_x_expr();
/// x log(g(x)/x)
[[nodiscard]] LogExpr x_log_ratio_expr(const CoefficientSpec& g);

struct LimitVerdict {
    enum class Kind { Zero, Finite, Infinite, Inconclusive };

    Kind kind = Kind::Inconclusive;
    /// Limit value for Finite; 0 for Zero; +inf for Infinite; NaN otherwise.
    double value = 0.0;
    std::vector<double> log_ratios;

    [[nodiscard]] std::string to_string() const;
};

inline constexpr std::array<double, 6> kDefaultProbeScales{10.0, 30.0, 100.0, 300.0, 1000.0, 3000.0};

/// Heuristic thresholds of the verdicts. Defaults: ln 100 and 1e-3.
struct ProbeThresholds {
    double decisive_log = 4.605170185988091;
    double finite_tolerance = 1e-3;
};

/// Decides lim num(x)/den(x) from log(num/den) at the given log-scales
/// (strictly increasing, at least four).
[[nodiscard]] LimitVerdict limit_probe(const LogExpr& numerator, const LogExpr& denominator,
                                       std::span<const double> scales = kDefaultProbeScales,
                                       const ProbeThresholds& thresholds = {});

}  // namespace ddegrowth
