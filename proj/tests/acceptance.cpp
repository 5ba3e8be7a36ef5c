// One PASS/FAIL line per acceptance criterion. Oracles are computed here from
// raw trajectories and closed forms, independently of the estimators under test.

#include "ddegrowth/analysis.hpp"
#include "ddegrowth/cli.hpp"
#include "ddegrowth/errors.hpp"

#include <boost/math/special_functions/lambert_w.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace ddegrowth;

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kE = std::numbers::e;

int failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
    std::printf("criterion %s: %s  %s\n", id.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
    if (!pass) {
        ++failures;
    }
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

void guarded(const std::string& id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("threw: ") + e.what());
    }
}

Scenario make(CoefficientSpec g, std::int64_t n, double horizon, CoefficientSpec f = CoefficientSpec::zero()) {
    return Scenario::make(std::move(f), std::move(g), 1.0, History::constant(1.0), n, horizon);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Median over the last quarter of numerator(log x_n) / (n h) for n past the warmup.
double tail_median(const Trajectory& traj, std::int64_t step_n, const std::function<double(double)>& numerator) {
    const std::int64_t start = std::max<std::int64_t>(10 * step_n, 100);
    std::vector<double> ratios;
    for (std::int64_t n = start; n <= traj.last_n(); ++n) {
        ratios.push_back(numerator(traj.state(n).log_value()) / traj.t(n));
    }
    const auto tail = std::max<std::size_t>(30, ratios.size() / 4);
    return median(std::vector<double>(ratios.end() - static_cast<std::ptrdiff_t>(tail), ratios.end()));
}

double sqrt_h(double log_x) { return 2.0 * (std::exp(0.5 * log_x) - 1.0); }
double log_log(double log_x) { return std::log(log_x); }

void criterion_1() {
    const auto s10 = make(CoefficientSpec::power(1.0, 0.5), 10, 2000.0);
    const auto s2 = s10.with_step_n(2);
    const VerifyOutcome v10 = verify(s10, 0.02);
    const VerifyOutcome v2 = verify(s2, 0.02);
    const double o10 = tail_median(simulate_euler(s10), 10, sqrt_h);
    const double o2 = tail_median(simulate_euler(s2), 2, sqrt_h);
    const bool pass = v10.passed && v10.estimate.verdict == Verdict::Converged && std::abs(o10 - 1.0) <= 0.02 &&
                      std::abs(v10.estimate.point - o10) <= 1e-5 && std::abs(v10.estimate.point - v2.estimate.point) < 0.02 &&
                      std::abs(o2 - o10) < 0.02;
    report("1", pass,
           fmt("sublinear H(x)/t: N=10 %.5f (%s), N=2 %.5f, oracle %.5f / %.5f, target 1 +- 0.02", v10.estimate.point,
               to_string(v10.estimate.verdict).c_str(), v2.estimate.point, o10, o2));
}

void criterion_2() {
    const auto s = make(CoefficientSpec::linear(1.0), 16, 300.0);
    const std::array<std::int64_t, 3> ns{16, 32, 64};
    const SweepTable table = sweep_h(s, ns);
    const double lambda = boost::math::lambert_w0(1.0);

    // Oracle extrapolation through the two finest steps.
    const auto identity = [](double log_x) { return log_x; };
    const double e32 = tail_median(simulate_euler(s.with_step_n(32)), 32, identity);
    const double e64 = tail_median(simulate_euler(s.with_step_n(64)), 64, identity);
    const double h32 = 1.0 / 32.0;
    const double h64 = 1.0 / 64.0;
    const double oracle = e64 - h64 * (e32 - e64) / (h32 - h64);

    const bool pass = std::abs(table.extrapolated - lambda) <= 0.02 * lambda &&
                      std::abs(oracle - lambda) <= 0.02 * lambda &&
                      std::abs(solve_char_eq(1.0, 1.0) - lambda) <= 1e-12;
    report("2", pass,
           fmt("linear log x/t extrapolated %.5f (oracle %.5f) vs W(1) = %.10f, within 2%%", table.extrapolated, oracle,
               lambda));
}

void criterion_3() {
    const VerifyOutcome v = verify(make(CoefficientSpec::lin_times_exp_log_pow(1.0, 0.5), 4, 400.0), 0.05);
    const double target = 1.0 / (1.0 + 0.25);
    const bool pass = v.passed && std::abs(v.estimate.point - target) <= 0.05 * target;
    report("3", pass, fmt("RV(1) G(x)/t %.5f (%s) vs 0.8 +- 5%%", v.estimate.point,
                          to_string(v.estimate.verdict).c_str()));
}

void criterion_4() {
    const auto s = make(CoefficientSpec::power(1.0, 2.0), 4, 600.0);
    const VerifyOutcome v = verify(s, 0.03);
    const double target = kLn2 / 1.25;
    const double oracle = tail_median(simulate_euler(s), 4, log_log);
    const bool pass = v.passed && std::abs(v.estimate.point - target) <= 0.03 * target &&
                      std::abs(oracle - target) <= 0.03 * target;
    report("4", pass, fmt("polynomial log log x/t %.5f (oracle %.5f, %s) vs %.6f +- 3%%", v.estimate.point, oracle,
                          to_string(v.estimate.verdict).c_str(), target));
}

void criterion_5() {
    const auto s = make(CoefficientSpec::power(1.0, 2.0), 4, 600.0);
    const std::array<std::int64_t, 4> ns{1, 2, 4, 8};
    const SweepTable table = sweep_h(s, ns);
    bool pass = table.rows.size() == 4;
    std::string detail = "estimates";
    for (const SweepRow& row : table.rows) {
        const double target = kLn2 / (1.0 + row.h);
        pass = pass && std::abs(row.estimate.point - target) <= 0.05 * target;
        detail += fmt(" h=%g:%.4f/%.4f", row.h, row.estimate.point, target);
    }
    pass = pass && std::abs(table.extrapolated - kLn2) <= 0.03 * kLn2;
    report("5", pass, detail + fmt("; extrapolated %.5f vs log 2 +- 3%%", table.extrapolated));
}

// G(y_n)/n over n in [40, 60] for y_{n+1} = y_n + g(y_n), y_0 = 2.
std::pair<double, double> lemma_ratios(const CoefficientSpec& g) {
    const Trajectory y = iterate_undelayed(g, 1.0, 2.0, 60);
    const auto G = GrowthFunctional::big_g(g);
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::int64_t n = 40; n <= 60; ++n) {
        const double r = G.evaluate(y.state(n)) / static_cast<double>(n);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {lo, hi};
}

void criterion_6() {
    // g = x^2 is regularly varying of index 2, outside the lemma's RV(1)
    // hypothesis: y_n = y_0^(2^n) asymptotically, so G(y_n)/n tends to log 2.
    const auto [lo, hi] = lemma_ratios(CoefficientSpec::power(1.0, 2.0));
    report("6", lo >= 0.98 && hi <= 1.02,
           fmt("g=power(1,2): G(y_n)/n in [%.4f, %.4f] over n in [40,60], expected 1 +- 2%%; "
               "x^2 is RV(2), not RV(1), and the ratio tends to log 2 = %.4f",
               lo, hi, kLn2));

    const auto rv1 = CoefficientSpec::lin_times_exp_log_pow(1.0, 0.5);
    const auto [rlo, rhi] = lemma_ratios(rv1);
    std::printf("supplement 6': %s  g=%s: G(y_n)/n in [%.4f, %.4f] over n in [40,60] (RV(1) case, 1 +- 2%%)\n",
                rlo >= 0.98 && rhi <= 1.02 ? "PASS" : "FAIL", rv1.to_string().c_str(), rlo, rhi);
}

void criterion_7() {
    const auto s = make(CoefficientSpec::power(1.0, 2.0), 4, 600.0, CoefficientSpec::power(1.0, 0.5));
    const VerifyOutcome v = verify(s, 0.03);
    const double target = kLn2 / 1.25;
    const double oracle = tail_median(simulate_euler(s), 4, log_log);

    bool refused = false;
    try {
        (void)predict(CoefficientSpec::power(1.0, 1.2), CoefficientSpec::power(1.0, 2.0), 1.0);
    } catch (const PredictionRefused&) {
        refused = true;
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run({"predict", "f=power(1,1.2)", "g=power(1,2)", "tau=1", "N=4", "horizon=600"}, out, err);

    const bool pass = v.passed && std::abs(oracle - target) <= 0.03 * target && refused && code == kExitConfigError;
    report("7", pass,
           fmt("f=power(1,0.5): %.5f (oracle %.5f) vs %.6f +- 3%%; f=power(1,1.2): refused=%s, predict exit %d",
               v.estimate.point, oracle, target, refused ? "yes" : "no", code));
}

// Worst relative error of F.quadrature against an oracle over 20 log-spaced
// points in x, log x from lower_log + 0.1 to lower_log + 250.
double worst_quadrature_error(const GrowthFunctional& F, const std::function<double(double)>& oracle) {
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double L = F.lower_log() + 0.1 * std::pow(2500.0, k / 19.0);
        const double expected = oracle(L);
        const double got = F.quadrature(LogReal::from_log(L));
        worst = std::max(worst, std::abs(got - expected) / std::abs(expected));
    }
    return worst;
}

void criterion_8() {
    double worst_gamma = 0.0;
    for (const double alpha : {0.25, 0.5, 0.75}) {
        const auto gamma = GrowthFunctional::gamma_of_phi(CoefficientSpec::power_log(1.0, 1.0, alpha), kE);
        worst_gamma = std::max(worst_gamma, worst_quadrature_error(gamma, [alpha](double L) {
                                   return (std::pow(L, 1.0 - alpha) - 1.0) / (1.0 - alpha);
                               }));
    }
    const auto big_g = GrowthFunctional::big_g(CoefficientSpec::linear(kE - 1.0));
    const double worst_g = worst_quadrature_error(big_g, [](double L) { return L; });
    report("8", worst_gamma <= 1e-8 && worst_g <= 1e-8,
           fmt("max relative error: Gamma of x(log x)^alpha %.2e, G of (e-1)x %.2e, bound 1e-8", worst_gamma,
               worst_g));
}

void criterion_9() {
    struct Case {
        const char* name;
        Scenario s;
    };
    const std::vector<Case> cases{
        {"sublinear", make(CoefficientSpec::power(1.0, 0.5), 10, 2000.0)},
        {"RV(1)", make(CoefficientSpec::lin_times_exp_log_pow(1.0, 0.5), 4, 400.0)},
        {"polynomial", make(CoefficientSpec::power(1.0, 2.0), 4, 600.0)},
    };
    bool pass = true;
    std::string detail;
    for (const Case& c : cases) {
        const EnvelopeSetup setup = envelope_setup(c.s, 0.5);
        const Trajectory traj = simulate_euler(c.s);
        const EnvelopeResult r = envelope_check(c.s, traj, setup.params, setup.functional);
        // Recheck each sample against the envelope on its own terms.
        bool independent = r.samples.size() == traj.size();
        for (const EnvelopeSample& sample : r.samples) {
            if (!sample.functional_space) {
                independent = independent && sample.log_envelope > traj.state(sample.n).log_value();
            } else {
                const double rhs = (1.0 + 0.5) * traj.t(sample.n) + setup.params.c_eps;
                independent = independent && setup.functional.scaled(setup.params.eta_eps)
                                                     .evaluate(traj.state(sample.n)) < rhs;
            }
        }
        pass = pass && r.dominated && independent;
        detail += fmt("%s%s %s over %zu steps", detail.empty() ? "" : ", ", c.name,
                      r.dominated && independent ? "dominated" : "violated", r.samples.size());
    }
    report("9", pass, detail + " (eps = 0.5)");
}

void criterion_10() {
    // Gamma for phi(x) = (1+x) log(1+x) log_2(1+x) from e^e, divided by eta = log 2.
    const auto F = GrowthFunctional::iterated_log(3, std::exp(kE)).scaled(kLn2);
    const double c = std::log(std::log(std::log1p(std::exp(kE))));
    const double worst = worst_quadrature_error(F, [c](double L) {
        const double log1p_x = L > 30.0 ? L + std::log1p(std::exp(-L)) : std::log1p(std::exp(L));
        return (std::log(std::log(log1p_x)) - c) / kLn2;
    });

    const auto s = make(CoefficientSpec::exp_log_pow(1.0, 2.0), 8, 40.0);
    const Trajectory traj = simulate_euler(s);
    std::vector<std::pair<double, double>> pts;  // (t, log_3 x)
    for (std::int64_t n = 0; n <= traj.last_n(); ++n) {
        const double L = traj.state(n).log_value();
        if (L >= kE) {
            pts.emplace_back(traj.t(n), std::log(std::log(L)));
        }
    }
    bool increasing = pts.size() >= 2;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        increasing = increasing && pts[i].second > pts[i - 1].second;
    }
    const double slope =
        pts.size() >= 2 ? (pts.back().second - pts.front().second) / (pts.back().first - pts.front().first) : 0.0;
    const IteratedLogSlope lib = iterated_log_slope(traj, 3);

    const bool pass = worst <= 1e-8 && increasing && std::abs(slope - kLn2) <= 0.3 * kLn2 &&
                      std::abs(lib.mean_slope - slope) <= 1e-9;
    report("10", pass,
           fmt("quadrature max relative error %.2e; log_3 x increasing=%s over %zu steps (truncated at n=%lld), "
               "mean slope %.4f vs log 2 +- 30%%",
               worst, increasing ? "yes" : "no", pts.size(), static_cast<long long>(traj.last_n()), slope));
}

}  // namespace

int main() {
    guarded("1", criterion_1);
    guarded("2", criterion_2);
    guarded("3", criterion_3);
    guarded("4", criterion_4);
    guarded("5", criterion_5);
    guarded("6", criterion_6);
    guarded("7", criterion_7);
    guarded("8", criterion_8);
    guarded("9", criterion_9);
    guarded("10", criterion_10);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
