#pragma once

// Rate predictions per regime, empirical rate estimates from trajectories,
// the linear characteristic equation, the comparison envelope and h-sweeps.

#include "ddegrowth/coefficients.hpp"
#include "ddegrowth/functionals.hpp"
#include "ddegrowth/simulator.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddegrowth {

/// What is divided by t = nh to form the rate sequence.
enum class Observable {
    FunctionalOverT,  // F(x) / t with F the prediction's functional
    LogOverT,         // log x / t
    LogLogOverT,      // log log x / t
    LogLogLogOverT,   // log log log x / t
};

[[nodiscard]] std::string to_string(Observable o);

struct HypothesisCheck {
    /// e.g. "f/x -> 0"
    std::string condition;
    LimitVerdict verdict;

    [[nodiscard]] bool holds() const noexcept { return verdict.kind == LimitVerdict::Kind::Zero; }
};

/// predict() could not commit to a rate: unsupported regime or a failed
/// dominance hypothesis. condition() names what failed.
class PredictionRefused : public std::runtime_error {
public:
    PredictionRefused(std::string condition, const std::string& what)
        : std::runtime_error(what), condition_(std::move(condition)) {}

    [[nodiscard]] const std::string& condition() const noexcept { return condition_; }

private:
    std::string condition_;
};

class Prediction {
public:
    enum class DiscreteRule {
        Constant,      // discrete rate equals the continuous one for every h
        OverTauPlusH,  // numerator / (tau + h)
        Unavailable,
    };

    Prediction(Regime regime, GrowthFunctional functional, Observable observable, double continuous_rate,
               DiscreteRule rule, double numerator, double tau);

    [[nodiscard]] const Regime& regime() const noexcept { return regime_; }
    [[nodiscard]] const GrowthFunctional& functional() const noexcept { return functional_; }
    [[nodiscard]] Observable observable() const noexcept { return observable_; }
    [[nodiscard]] double continuous_rate() const noexcept { return continuous_; }
    [[nodiscard]] DiscreteRule discrete_rule() const noexcept { return rule_; }
    /// lambda(h); nullopt when the regime has no discrete prediction.
    [[nodiscard]] std::optional<double> discrete_rate(double h) const;
    /// discrete_rate(h) when available, otherwise the continuous rate.
    [[nodiscard]] double target_rate(double h) const;

    /// Numerator of the ratio at state x: F(x), log x, log log x or
    /// log log log x. nullopt where undefined (x below F's lower limit, or
    /// an iterated log not yet positive).
    [[nodiscard]] std::optional<double> observe(LogReal x) const;

    std::vector<HypothesisCheck> hypotheses;
    std::vector<std::string> notes;

private:
    Regime regime_;
    GrowthFunctional functional_;
    Observable observable_;
    double continuous_;
    DiscreteRule rule_;
    double numerator_;
    double tau_;
};

/// Classifies g, probes the dominance hypotheses on f and builds the
/// prediction. Throws PredictionRefused.
[[nodiscard]] Prediction predict(const CoefficientSpec& f, const CoefficientSpec& g, double tau);
[[nodiscard]] Prediction predict(const Scenario& s);

/// Unique lambda > 0 with lambda = C exp(-lambda tau), by bisection on [0, C].
[[nodiscard]] double solve_char_eq(double C, double tau);

// ---------------------------------------------------------------------------
// Estimation
// ---------------------------------------------------------------------------

enum class Verdict { Converged, Trending, Inconclusive };

[[nodiscard]] std::string to_string(Verdict v);

struct RateEstimate {
    double point = 0.0;
    std::int64_t tail_start = 0;
    std::int64_t tail_end = 0;
    /// max - min of the ratio over the tail.
    double dispersion = 0.0;
    Verdict verdict = Verdict::Inconclusive;
};

struct EstimateOptions {
    /// Converged needs dispersion <= tolerance * |point|.
    double tolerance = 0.05;
    std::size_t min_samples = 100;
    std::size_t min_tail = 30;
    double tail_fraction = 0.25;
};

/// Tail statistics of a ratio sequence whose first entry belongs to step
/// first_n. Throws EstimationError below min_samples.
[[nodiscard]] RateEstimate estimate_from_ratios(std::span<const double> ratios, std::int64_t first_n,
                                                const EstimateOptions& options = {});

/// First step used for estimation: max(10 N, 100).
[[nodiscard]] std::int64_t warmup_steps(std::int64_t step_n) noexcept;

/// Ratios observe(x_h(n)) / (n h) past the warmup. Steps where the
/// observable is undefined are skipped; they can only form a prefix since
/// the trajectory increases.
struct RatioSeries {
    std::int64_t first_n = 0;
    std::vector<double> ratios;
};
[[nodiscard]] RatioSeries ratio_series(const Trajectory& traj, const Prediction& pred);

[[nodiscard]] RateEstimate estimate_rate(const Trajectory& traj, const Prediction& pred,
                                         const EstimateOptions& options = {});

/// Functional and ratio columns for the trajectory CSV (n >= 1 only).
[[nodiscard]] TrajectoryColumns observable_columns(const Trajectory& traj, const Prediction& pred);

/// Least-squares and end-to-end slopes of log_depth x against t, over the
/// samples with log_depth x >= 0.
struct IteratedLogSlope {
    double mean_slope = 0.0;
    double fitted_slope = 0.0;
    bool increasing = false;
    std::int64_t first_n = 0;
    std::int64_t last_n = 0;
};
[[nodiscard]] IteratedLogSlope iterated_log_slope(const Trajectory& traj, int depth);

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

/// Relative tolerance on |estimate - target| / target used by verify when none
/// is configured: 0.02 sublinear and linear, 0.05 RV(1), 0.03 polynomial,
/// 0.3 faster than polynomial.
[[nodiscard]] double default_tolerance(const Regime& regime) noexcept;

struct VerifyOutcome {
    Prediction prediction;
    RateEstimate estimate;
    double h = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    /// Absolute allowance added to tolerance * target (3 h lambda^2 in the
    /// linear regime, zero elsewhere).
    double slack = 0.0;
    bool truncated = false;
    bool passed = false;

    [[nodiscard]] double relative_error() const noexcept;
};

/// simulate_euler, predict, estimate_rate; passed iff the estimate is
/// Converged and within tolerance * target + slack of the target.
[[nodiscard]] VerifyOutcome verify(const Scenario& s, std::optional<double> tolerance = std::nullopt);

// ---------------------------------------------------------------------------
// Comparison envelope
// ---------------------------------------------------------------------------

struct EnvelopeParams {
    double epsilon = 0.5;
    double eta_eps = 0.0;
    double c_eps = 0.0;
};

/// Everything the envelope needs for one scenario: the unscaled functional
/// Gamma, the rate eta(eps) and the thresholds x1, x2 found on the ladder.
struct EnvelopeSetup {
    EnvelopeParams params;
    GrowthFunctional functional;
    double log_x1 = 0.0;
    double log_x2 = 0.0;
};

/// Builds eta(eps), phi and c(eps) = Gamma_eta(psi* + x1 + x2) + (1 + eps) tau
/// for the scenario's regime. x1 and x2 are the first rungs of a log-spaced
/// ladder from which f <= eps eta phi and
/// g(x) < eta phi(Gamma_eta^{-1}(Gamma_eta(x) + tau)) hold on every later rung.
/// Throws PreconditionError when no rung works.
[[nodiscard]] EnvelopeSetup envelope_setup(const Scenario& s, double epsilon);

struct EnvelopeSample {
    std::int64_t n = 0;
    /// log x_eps(n); NaN when the inversion ran past the horizon.
    double log_envelope = 0.0;
    double log_state = 0.0;
    /// log x_eps - log x_h, or (1+eps)nh + c - Gamma_eta(x_h) when compared
    /// in functional space.
    double margin = 0.0;
    bool functional_space = false;
};

struct EnvelopeResult {
    bool dominated = true;
    std::optional<std::int64_t> first_violation;
    std::size_t functional_space_steps = 0;
    std::vector<EnvelopeSample> samples;
};

/// x_eps(n) = Gamma_eta^{-1}((1+eps) n h + c) against every sample of traj.
/// When the inverse would pass log x = 1e300 the step is compared as
/// Gamma_eta(x_h(n)) < (1+eps) n h + c instead, which is the same statement
/// because Gamma_eta is increasing. Throws PreconditionError when c is
/// too small for x_eps to be well defined.
[[nodiscard]] EnvelopeResult envelope_check(const Scenario& s, const Trajectory& traj, const EnvelopeParams& p,
                                            const GrowthFunctional& F);

/// CSV with header `n,t,log_envelope,log_x,margin,space`.
void write_envelope_csv(std::ostream& out, const EnvelopeResult& result, double h);

// ---------------------------------------------------------------------------
// h-sweep
// ---------------------------------------------------------------------------

struct SweepRow {
    std::int64_t step_n = 0;
    double h = 0.0;
    std::optional<double> predicted;
    RateEstimate estimate;
};

struct SweepTable {
    /// Sorted by decreasing h.
    std::vector<SweepRow> rows;
    double continuous_rate = 0.0;
    /// Line through the two smallest-h estimates, evaluated at h = 0.
    double extrapolated = 0.0;
};

/// One simulation per N, run concurrently. Needs at least three N values.
[[nodiscard]] SweepTable sweep_h(const Scenario& s, std::span<const std::int64_t> step_ns,
                                 const EstimateOptions& options = {});

/// CSV with header `h,N,predicted,estimated,dispersion,verdict`; the final
/// row is h = 0 with the continuous rate and the extrapolated estimate.
void write_sweep_csv(std::ostream& out, const SweepTable& table);

}  // namespace ddegrowth
