#pragma once

// Uniform-step Euler scheme for x'(t) = f(x(t)) + g(x(t - tau)):
//
//   x_h(n+1) = x_h(n) + h f(x_h(n)) + h g(x_h(n - N)),  n >= 0
//   x_h(n)   = psi(n h),                                n = -N, ..., 0
//
// with h = tau / N. The step is always derived from the integer N so the
// delay is an exact multiple of it.

#include "ddegrowth/coefficients.hpp"
#include "ddegrowth/logreal.hpp"

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ddegrowth {

class History {
public:
    [[nodiscard]] static History constant(double psi0);
    /// Linear from psi(-tau) = at_minus_tau to psi(0) = at_zero.
    [[nodiscard]] static History ramp(double at_minus_tau, double at_zero);

    /// psi(t) for t in [-tau, 0].
    [[nodiscard]] double at(double t, double tau) const;
    /// psi* = max over [-tau, 0].
    [[nodiscard]] double psi_star() const noexcept { return std::max(start_, end_); }
    [[nodiscard]] double psi_min() const noexcept { return std::min(start_, end_); }
    [[nodiscard]] bool is_constant() const noexcept { return constant_; }
    /// "const(v)" or "ramp(a,b)".
    [[nodiscard]] std::string to_string() const;

private:
    History(bool constant, double start, double end) : constant_(constant), start_(start), end_(end) {}

    bool constant_;
    double start_;
    double end_;
};

/// Parses `const(v)` or `ramp(a,b)`.
[[nodiscard]] History parse_history(std::string_view text);

class Scenario {
public:
    /// Validates every invariant: tau, N, horizon positive; g positive and
    /// eventually nondecreasing; f admits no finite-time explosion
    /// (int_1^inf du/f(u) = inf, vacuous for f = 0). Throws DomainError.
    [[nodiscard]] static Scenario make(CoefficientSpec f, CoefficientSpec g, double tau, History history,
                                       std::int64_t step_n, double horizon_t);

    [[nodiscard]] const CoefficientSpec& f() const noexcept { return f_; }
    [[nodiscard]] const CoefficientSpec& g() const noexcept { return g_; }
    [[nodiscard]] double tau() const noexcept { return tau_; }
    [[nodiscard]] const History& history() const noexcept { return history_; }
    [[nodiscard]] std::int64_t step_n() const noexcept { return step_n_; }
    [[nodiscard]] double horizon() const noexcept { return horizon_; }
    [[nodiscard]] double h() const noexcept { return tau_ / static_cast<double>(step_n_); }
    /// Number of forward Euler steps needed to reach the horizon.
    [[nodiscard]] std::int64_t steps() const noexcept;

    [[nodiscard]] Scenario with_step_n(std::int64_t step_n) const;
    [[nodiscard]] Scenario with_f(CoefficientSpec f) const;

    /// Canonical one-line description; the fingerprint hashes it.
    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] std::uint64_t fingerprint() const;

private:
    Scenario(CoefficientSpec f, CoefficientSpec g, double tau, History history, std::int64_t step_n,
             double horizon_t);

    CoefficientSpec f_;
    CoefficientSpec g_;
    double tau_;
    History history_;
    std::int64_t step_n_;
    double horizon_;
};

enum class Mode { LogDomain, Direct };

/// Samples n = first_n ... last_n of one run; immutable once built.
class Trajectory {
public:
    Trajectory(std::int64_t first_n, double h, std::vector<LogReal> states, Mode mode, bool truncated,
               std::uint64_t fingerprint, std::vector<double> direct_values = {});

    [[nodiscard]] std::int64_t first_n() const noexcept { return first_n_; }
    [[nodiscard]] std::int64_t last_n() const noexcept {
        return first_n_ + static_cast<std::int64_t>(states_.size()) - 1;
    }
    [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] double t(std::int64_t n) const noexcept { return static_cast<double>(n) * h_; }
    /// log x_h(n).
    [[nodiscard]] LogReal state(std::int64_t n) const;
    /// x_h(n) itself: the exact double for Direct runs, exp(state) otherwise.
    [[nodiscard]] double value(std::int64_t n) const;
    [[nodiscard]] std::span<const LogReal> states() const noexcept { return states_; }
    [[nodiscard]] Mode mode() const noexcept { return mode_; }
    [[nodiscard]] bool truncated() const noexcept { return truncated_; }
    [[nodiscard]] std::uint64_t fingerprint() const noexcept { return fingerprint_; }

private:
    std::int64_t first_n_;
    double h_;
    std::vector<LogReal> states_;
    std::vector<double> direct_;
    Mode mode_;
    bool truncated_;
    std::uint64_t fingerprint_;
};

/// The scheme in log-domain arithmetic. Stops at the horizon or when a state
/// would pass kMaxLogValue (truncated = true). Coefficient domain errors
/// surface as SimulationError carrying the step index.
[[nodiscard]] Trajectory simulate_euler(const Scenario& s);

/// The same recursion in native doubles; stops before the first state above
/// cap (truncated = true in that case).
[[nodiscard]] Trajectory simulate_direct(const Scenario& s, double cap);

/// Piecewise-linear interpolant of the samples, in log form, for t in
/// [-tau, last sample time].
[[nodiscard]] LogReal interpolate(const Trajectory& traj, double t);

/// y_{n+1} = y_n + h g(y_n), y_0 = y0, for g in the RV1Superlinear regime;
/// PreconditionError otherwise.
[[nodiscard]] Trajectory simulate_undelayed(const CoefficientSpec& g, double h, double y0, std::int64_t steps);

/// The undelayed recursion with no regime gate.
[[nodiscard]] Trajectory iterate_undelayed(const CoefficientSpec& g, double h, double y0, std::int64_t steps);

/// Optional per-sample columns for the trajectory CSV.
struct TrajectoryColumns {
    std::vector<std::optional<double>> functional;
    std::vector<std::optional<double>> ratio;
};

/// CSV with header `n,t,log_x,functional,ratio`; numbers in shortest
/// round-trip form, missing columns left empty.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const TrajectoryColumns* columns = nullptr);

}  // namespace ddegrowth
