#include "ddegrowth/analysis.hpp"

#include "ddegrowth/errors.hpp"
#include "ddegrowth/numfmt.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <ostream>

namespace ddegrowth {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using K = Regime::Kind;

HypothesisCheck probe(const std::string& condition, const LogExpr& num, const LogExpr& den) {
    return HypothesisCheck{condition, limit_probe(num, den)};
}

std::vector<HypothesisCheck> hypotheses_for(const Regime& regime, const CoefficientSpec& f,
                                            const CoefficientSpec& g) {
    const LogExpr fx = as_expr(f);
    switch (regime.kind) {
        case K::SublinearRV: return {probe("f/g -> 0", fx, as_expr(g))};
        case K::RV1Superlinear:
            return {probe("f/x -> 0", fx, identity_expr()),
                    probe("f/(x log(g/x)) -> 0", fx, x_log_ratio_expr(g))};
        case K::PolySuperlinear:
            return {probe("f/x -> 0", fx, identity_expr()), probe("f/(x log x) -> 0", fx, x_log_x_expr())};
        case K::LinearRV:
        case K::FasterThanPoly: return {probe("f/x -> 0", fx, identity_expr())};
        case K::Unsupported: break;
    }
    return {};
}

std::optional<double> iterated_log_of(LogReal x, int depth) {
    // log_1 x = log x, log_{k+1} x = log log_k x
    double value = x.log_value();
    for (int k = 1; k < depth; ++k) {
        if (!(value > 0.0)) {
            return std::nullopt;
        }
        value = std::log(value);
    }
    if (std::isnan(value) || std::isinf(value)) {
        return std::nullopt;
    }
    return value;
}

}  // namespace

std::string to_string(Observable o) {
    switch (o) {
        case Observable::FunctionalOverT: return "F(x)/t";
        case Observable::LogOverT: return "log x/t";
        case Observable::LogLogOverT: return "log log x/t";
        case Observable::LogLogLogOverT: return "log log log x/t";
    }
    return "?";
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Converged: return "Converged";
        case Verdict::Trending: return "Trending";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Prediction
// ---------------------------------------------------------------------------

Prediction::Prediction(Regime regime, GrowthFunctional functional, Observable observable, double continuous_rate,
                       DiscreteRule rule, double numerator, double tau)
    : regime_(regime),
      functional_(std::move(functional)),
      observable_(observable),
      continuous_(continuous_rate),
      rule_(rule),
      numerator_(numerator),
      tau_(tau) {}

std::optional<double> Prediction::discrete_rate(double h) const {
    switch (rule_) {
        case DiscreteRule::Constant: return continuous_;
        case DiscreteRule::OverTauPlusH: return numerator_ / (tau_ + h);
        case DiscreteRule::Unavailable: break;
    }
    return std::nullopt;
}

double Prediction::target_rate(double h) const { return discrete_rate(h).value_or(continuous_); }

std::optional<double> Prediction::observe(LogReal x) const {
    switch (observable_) {
        case Observable::FunctionalOverT:
            if (std::isnan(x.log_value()) || x.log_value() < functional_.lower_log()) {
                return std::nullopt;
            }
            return functional_.evaluate(x);
        case Observable::LogOverT: return iterated_log_of(x, 1);
        case Observable::LogLogOverT: return iterated_log_of(x, 2);
        case Observable::LogLogLogOverT: return iterated_log_of(x, 3);
    }
    return std::nullopt;
}

Prediction predict(const CoefficientSpec& f, const CoefficientSpec& g, double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw DomainError("tau must be positive and finite");
    }
    const Regime regime = classify_regime(g);
    if (regime.kind == K::Unsupported) {
        throw PredictionRefused("supported regime", "g = " + g.to_string() + " falls outside every supported regime");
    }

    std::vector<HypothesisCheck> checks = hypotheses_for(regime, f, g);
    for (const HypothesisCheck& c : checks) {
        if (!c.holds()) {
            throw PredictionRefused(c.condition, "hypothesis " + c.condition + " fails for f = " + f.to_string() +
                                                     ", g = " + g.to_string() + " (probe: " +
                                                     c.verdict.to_string() + "); the delayed term does not dominate");
        }
    }

    using R = Prediction::DiscreteRule;
    std::optional<Prediction> out;
    std::vector<std::string> notes;
    switch (regime.kind) {
        case K::SublinearRV:
            out.emplace(regime, GrowthFunctional::sublinear_h(g), Observable::FunctionalOverT, 1.0, R::Constant, 1.0,
                        tau);
            break;
        case K::RV1Superlinear:
            out.emplace(regime, GrowthFunctional::big_g(g), Observable::FunctionalOverT, 1.0 / tau, R::OverTauPlusH,
                        1.0, tau);
            if (const auto* p = std::get_if<form::LinTimesExpLogPow>(&g.form())) {
                const double a = p->alpha;
                const double limit = std::pow((1.0 - a) / tau, 1.0 / (1.0 - a));
                notes.push_back("log x(t) / t^(1/(1-alpha)) -> ((1-alpha)/tau)^(1/(1-alpha)) = " + format_double(limit) +
                                "; eta = 1 is derived from G(x(t))/t -> 1/tau, the closed form elsewhere leaves "
                                "eta unspecified");
            }
            break;
        case K::PolySuperlinear: {
            const double lb = std::log(regime.parameter);
            out.emplace(regime, GrowthFunctional::iterated_log(2, 1.0), Observable::LogLogOverT, lb / tau,
                        R::OverTauPlusH, lb, tau);
            break;
        }
        case K::LinearRV:
            out.emplace(regime, GrowthFunctional::gamma_of_phi(CoefficientSpec::linear(1.0), 1.0),
                        Observable::LogOverT, solve_char_eq(regime.parameter, tau), R::Unavailable, 0.0, tau);
            notes.emplace_back("no discrete-time rate is known for this regime; the estimate is compared with the "
                               "continuous rate plus a slack of 3 h lambda^2");
            break;
        case K::FasterThanPoly: {
            const double la = std::log(regime.parameter);
            out.emplace(regime, GrowthFunctional::iterated_log(3, std::exp(std::numbers::e)),
                        Observable::LogLogLogOverT, la / tau, R::Unavailable, 0.0, tau);
            notes.emplace_back("no discrete-time rate is known for this regime; log x leaves the double range "
                               "after a few delay intervals, so the limit is rarely observable");
            break;
        }
        case K::Unsupported: break;
    }
    out->hypotheses = std::move(checks);
    out->notes = std::move(notes);
    return std::move(*out);
}

Prediction predict(const Scenario& s) { return predict(s.f(), s.g(), s.tau()); }

double solve_char_eq(double C, double tau) {
    if (!(C > 0.0) || !std::isfinite(C) || !(tau > 0.0) || !std::isfinite(tau)) {
        throw DomainError("characteristic equation needs C > 0 and tau > 0");
    }
    // nu - C e^{-nu tau} is increasing, -C at 0 and >= 0 at C.
    const auto residual = [C, tau](double nu) { return nu - C * std::exp(-nu * tau); };
    double lo = 0.0;
    double hi = C;
    while (true) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (residual(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::abs(residual(lo)) <= std::abs(residual(hi)) ? lo : hi;
}

// ---------------------------------------------------------------------------
// Estimation
// ---------------------------------------------------------------------------

std::int64_t warmup_steps(std::int64_t step_n) noexcept { return std::max<std::int64_t>(10 * step_n, 100); }

RateEstimate estimate_from_ratios(std::span<const double> ratios, std::int64_t first_n,
                                  const EstimateOptions& options) {
    if (ratios.size() < options.min_samples) {
        throw EstimationError("rate estimation needs at least " + std::to_string(options.min_samples) +
                              " samples past the warmup, got " + std::to_string(ratios.size()));
    }
    const auto quarter = static_cast<std::size_t>(std::ceil(options.tail_fraction * static_cast<double>(ratios.size())));
    const std::size_t tail_len = std::min(ratios.size(), std::max(options.min_tail, quarter));
    const std::span<const double> tail = ratios.subspan(ratios.size() - tail_len);

    std::vector<double> sorted(tail.begin(), tail.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    const double median = m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);

    RateEstimate out;
    out.point = median;
    out.dispersion = sorted.back() - sorted.front();
    out.tail_end = first_n + static_cast<std::int64_t>(ratios.size()) - 1;
    out.tail_start = out.tail_end - static_cast<std::int64_t>(tail_len) + 1;

    if (tail_len >= options.min_tail && out.dispersion <= options.tolerance * std::abs(median)) {
        out.verdict = Verdict::Converged;
    } else if (std::is_sorted(tail.begin(), tail.end()) ||
               std::is_sorted(tail.begin(), tail.end(), std::greater<>())) {
        out.verdict = Verdict::Trending;
    } else {
        out.verdict = Verdict::Inconclusive;
    }
    return out;
}

RatioSeries ratio_series(const Trajectory& traj, const Prediction& pred) {
    const std::int64_t step_n = -traj.first_n();
    RatioSeries out;
    const std::int64_t start = std::max<std::int64_t>(warmup_steps(step_n), 1);
    for (std::int64_t n = start; n <= traj.last_n(); ++n) {
        const auto value = pred.observe(traj.state(n));
        if (!value) {
            if (!out.ratios.empty()) {
                throw EstimationError("observable " + to_string(pred.observable()) + " undefined at step " +
                                      std::to_string(n) + " after being defined");
            }
            continue;
        }
        if (out.ratios.empty()) {
            out.first_n = n;
        }
        out.ratios.push_back(*value / traj.t(n));
    }
    return out;
}

RateEstimate estimate_rate(const Trajectory& traj, const Prediction& pred, const EstimateOptions& options) {
    const RatioSeries series = ratio_series(traj, pred);
    return estimate_from_ratios(series.ratios, series.first_n, options);
}

TrajectoryColumns observable_columns(const Trajectory& traj, const Prediction& pred) {
    TrajectoryColumns cols;
    cols.functional.resize(traj.size());
    cols.ratio.resize(traj.size());
    for (std::int64_t n = std::max<std::int64_t>(traj.first_n(), 1); n <= traj.last_n(); ++n) {
        const auto value = pred.observe(traj.state(n));
        if (value) {
            const auto i = static_cast<std::size_t>(n - traj.first_n());
            cols.functional[i] = *value;
            cols.ratio[i] = *value / traj.t(n);
        }
    }
    return cols;
}

IteratedLogSlope iterated_log_slope(const Trajectory& traj, int depth) {
    if (depth < 1) {
        throw DomainError("iterated log depth must be >= 1");
    }
    std::vector<double> ts;
    std::vector<double> ys;
    IteratedLogSlope out;
    for (std::int64_t n = traj.first_n(); n <= traj.last_n(); ++n) {
        const auto y = iterated_log_of(traj.state(n), depth);
        if (!y || *y < 0.0) {
            continue;
        }
        if (ts.empty()) {
            out.first_n = n;
        }
        out.last_n = n;
        ts.push_back(traj.t(n));
        ys.push_back(*y);
    }
    if (ts.size() < 2) {
        throw EstimationError("fewer than two samples with log_" + std::to_string(depth) + " x >= 0");
    }
    out.increasing = std::adjacent_find(ys.begin(), ys.end(), std::greater_equal<>()) == ys.end();
    out.mean_slope = (ys.back() - ys.front()) / (ts.back() - ts.front());

    double mt = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i];
        my += ys[i];
    }
    mt /= static_cast<double>(ts.size());
    my /= static_cast<double>(ts.size());
    double sty = 0.0;
    double stt = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sty += (ts[i] - mt) * (ys[i] - my);
        stt += (ts[i] - mt) * (ts[i] - mt);
    }
    out.fitted_slope = sty / stt;
    return out;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

double default_tolerance(const Regime& regime) noexcept {
    switch (regime.kind) {
        case K::SublinearRV: return 0.02;
        case K::LinearRV: return 0.02;
        case K::RV1Superlinear: return 0.05;
        case K::PolySuperlinear: return 0.03;
        case K::FasterThanPoly: return 0.3;
        case K::Unsupported: break;
    }
    return 0.0;
}

double VerifyOutcome::relative_error() const noexcept { return std::abs(estimate.point - target) / std::abs(target); }

VerifyOutcome verify(const Scenario& s, std::optional<double> tolerance) {
    Prediction pred = predict(s);
    const Trajectory traj = simulate_euler(s);
    const RateEstimate est = estimate_rate(traj, pred);
    const double h = s.h();
    const double target = pred.target_rate(h);
    const double tol = tolerance.value_or(default_tolerance(pred.regime()));
    const double slack =
        pred.regime().kind == K::LinearRV ? 3.0 * h * pred.continuous_rate() * pred.continuous_rate() : 0.0;
    const bool within = std::abs(est.point - target) <= tol * std::abs(target) + slack;
    VerifyOutcome out{std::move(pred), est, h, target, tol, slack, traj.truncated(), false};
    out.passed = within && est.verdict == Verdict::Converged;
    return out;
}

// ---------------------------------------------------------------------------
// Envelope
// ---------------------------------------------------------------------------

namespace {

// Offsets of the log x ladder above the functional's lower limit.
constexpr double kLadder[] = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0};

struct EnvelopeShape {
    GrowthFunctional functional;
    double eta;
};

EnvelopeShape envelope_shape(const Scenario& s, const Prediction& pred, double epsilon) {
    const Regime& r = pred.regime();
    const double lo = s.history().psi_min();
    switch (r.kind) {
        case K::SublinearRV: return {GrowthFunctional::gamma_of_phi(s.g(), lo), 1.0 + epsilon};
        case K::RV1Superlinear: {
            const double eta = (1.0 + epsilon) / s.tau();
            if (const auto* p = std::get_if<form::LinTimesExpLogPow>(&s.g().form())) {
                // phi = x (log x)^alpha has the closed-form Gamma.
                return {GrowthFunctional::gamma_of_phi(CoefficientSpec::power_log(1.0, 1.0, p->alpha),
                                                       std::numbers::e),
                        eta};
            }
            return {GrowthFunctional::big_g(s.g()), eta};
        }
        case K::PolySuperlinear:
            return {GrowthFunctional::iterated_log(2, lo), (1.0 + epsilon) * std::log(r.parameter) / s.tau()};
        case K::LinearRV:
            return {GrowthFunctional::gamma_of_phi(CoefficientSpec::linear(1.0), lo),
                    (1.0 + epsilon) * pred.continuous_rate()};
        case K::FasterThanPoly:
            return {GrowthFunctional::iterated_log(3, std::exp(std::numbers::e)),
                    (1.0 + epsilon) * std::log(r.parameter) / s.tau()};
        case K::Unsupported: break;
    }
    throw PreconditionError("no envelope for an unsupported regime");
}

// First rung from which pred holds on every later rung that could be
// evaluated; nullopt when the last evaluated rung fails.
template <class Pred>
std::optional<double> first_good_rung(double base_log, Pred holds) {
    std::optional<double> candidate;
    for (const double offset : kLadder) {
        const double L = base_log + offset;
        std::optional<bool> ok;
        try {
            ok = holds(L);
        } catch (const HorizonError&) {
            break;
        } catch (const DomainError&) {
            ok = false;
        }
        if (*ok) {
            if (!candidate) {
                candidate = L;
            }
        } else {
            candidate.reset();
        }
    }
    return candidate;
}

}  // namespace

EnvelopeSetup envelope_setup(const Scenario& s, double epsilon) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
        throw DomainError("epsilon must lie in (0, 1)");
    }
    const Prediction pred = predict(s);
    const EnvelopeShape shape = envelope_shape(s, pred, epsilon);
    const GrowthFunctional& F = shape.functional;
    const GrowthFunctional Fe = F.scaled(shape.eta);
    const double log_eta = std::log(shape.eta);
    const double base = F.lower_log();

    const auto log_phi_at = [&F](double L) { return F.log_phi(L); };

    const auto x1 = first_good_rung(base, [&](double L) {
        if (s.f().is_zero()) {
            return true;
        }
        const double lf = s.f().eval_log(LogReal::from_log(L)).log_value();
        return lf <= std::log(epsilon) + log_eta + log_phi_at(L);
    });
    const auto x2 = first_good_rung(base, [&](double L) {
        const LogReal x = LogReal::from_log(L);
        const LogReal shifted = Fe.invert(Fe.evaluate(x) + s.tau());
        const double lg = s.g().eval_log(x).log_value();
        return lg < log_eta + log_phi_at(shifted.log_value());
    });
    if (!x1) {
        throw PreconditionError("no ladder rung gives f <= eps eta phi for " + F.describe());
    }
    if (!x2) {
        throw PreconditionError("no ladder rung gives g(x) < eta phi(Gamma_eta^-1(Gamma_eta(x) + tau)) for " +
                                F.describe());
    }

    const LogReal start =
        log_add(LogReal::from_value(s.history().psi_star()), log_add(LogReal::from_log(*x1), LogReal::from_log(*x2)));
    EnvelopeSetup out{EnvelopeParams{epsilon, shape.eta, Fe.evaluate(start) + (1.0 + epsilon) * s.tau()}, F, *x1,
                      *x2};
    return out;
}

EnvelopeResult envelope_check(const Scenario& s, const Trajectory& traj, const EnvelopeParams& p,
                              const GrowthFunctional& F) {
    if (!F.diverges()) {
        throw PreconditionError("envelope functional " + F.describe() + " is bounded");
    }
    if (!(p.epsilon > 0.0) || !(p.epsilon < 1.0) || !(p.eta_eps > 0.0)) {
        throw PreconditionError("envelope needs eps in (0, 1) and eta > 0");
    }
    const GrowthFunctional Fe = F.scaled(p.eta_eps);
    const double psi_star = s.history().psi_star();
    const LogReal psi_log = LogReal::from_value(psi_star);
    const double floor_value = psi_log.log_value() >= Fe.lower_log() ? Fe.evaluate(psi_log) : 0.0;
    if (!(p.c_eps > floor_value + (1.0 + p.epsilon) * s.tau())) {
        throw PreconditionError("c(eps) = " + format_double(p.c_eps) + " must exceed Gamma_eta(psi*) + (1+eps) tau = " +
                                format_double(floor_value + (1.0 + p.epsilon) * s.tau()));
    }

    EnvelopeResult out;
    out.samples.reserve(traj.size());
    for (std::int64_t n = traj.first_n(); n <= traj.last_n(); ++n) {
        const double y = (1.0 + p.epsilon) * traj.t(n) + p.c_eps;
        const LogReal state = traj.state(n);
        EnvelopeSample sample;
        sample.n = n;
        sample.log_state = state.log_value();
        try {
            sample.log_envelope = Fe.invert(y).log_value();
            sample.margin = sample.log_envelope - sample.log_state;
        } catch (const HorizonError&) {
            sample.log_envelope = kNaN;
            sample.functional_space = true;
            ++out.functional_space_steps;
            // Below the lower limit the state is trivially under x_eps >= lower.
            const double at_state = state.log_value() >= Fe.lower_log() ? Fe.evaluate(state) : 0.0;
            sample.margin = y - at_state;
        }
        if (!(sample.margin > 0.0)) {
            if (out.dominated) {
                out.first_violation = n;
            }
            out.dominated = false;
        }
        out.samples.push_back(sample);
    }
    return out;
}

void write_envelope_csv(std::ostream& out, const EnvelopeResult& result, double h) {
    out << "n,t,log_envelope,log_x,margin,space\n";
    for (const EnvelopeSample& s : result.samples) {
        out << s.n << ',' << format_double(static_cast<double>(s.n) * h) << ',';
        if (!std::isnan(s.log_envelope)) {
            out << format_double(s.log_envelope);
        }
        out << ',' << format_double(s.log_state) << ',' << format_double(s.margin) << ','
            << (s.functional_space ? "functional" : "state") << '\n';
    }
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

SweepTable sweep_h(const Scenario& s, std::span<const std::int64_t> step_ns, const EstimateOptions& options) {
    if (step_ns.size() < 3) {
        throw PreconditionError("an h-sweep needs at least three values of N");
    }
    const Prediction pred = predict(s);

    std::vector<std::future<SweepRow>> jobs;
    jobs.reserve(step_ns.size());
    for (const std::int64_t n : step_ns) {
        const Scenario sn = s.with_step_n(n);
        jobs.push_back(std::async(std::launch::async, [sn, &pred, &options]() {
            const Trajectory traj = simulate_euler(sn);
            SweepRow row;
            row.step_n = sn.step_n();
            row.h = sn.h();
            row.predicted = pred.discrete_rate(sn.h());
            row.estimate = estimate_rate(traj, pred, options);
            return row;
        }));
    }

    SweepTable table;
    table.continuous_rate = pred.continuous_rate();
    for (auto& job : jobs) {
        table.rows.push_back(job.get());
    }
    std::sort(table.rows.begin(), table.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return a.h > b.h || (a.h == b.h && a.step_n < b.step_n);
    });
    const SweepRow& finest = table.rows[table.rows.size() - 1];
    const SweepRow& next = table.rows[table.rows.size() - 2];
    if (finest.h == next.h) {
        throw PreconditionError("an h-sweep needs distinct step sizes");
    }
    const double slope = (next.estimate.point - finest.estimate.point) / (next.h - finest.h);
    table.extrapolated = finest.estimate.point - slope * finest.h;
    return table;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
    out << "h,N,predicted,estimated,dispersion,verdict\n";
    for (const SweepRow& r : table.rows) {
        out << format_double(r.h) << ',' << r.step_n << ',' << (r.predicted ? format_double(*r.predicted) : "")
            << ',' << format_double(r.estimate.point) << ',' << format_double(r.estimate.dispersion) << ','
            << to_string(r.estimate.verdict) << '\n';
    }
    out << "0,," << format_double(table.continuous_rate) << ',' << format_double(table.extrapolated)
        << ",,extrapolated\n";
}

}  // namespace ddegrowth
