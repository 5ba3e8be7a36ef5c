#include "ddegrowth/analysis.hpp"
#include "ddegrowth/errors.hpp"

#include <boost/math/special_functions/lambert_w.hpp>
#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

using namespace ddegrowth;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Scenario scenario(CoefficientSpec g, std::int64_t n, double horizon, CoefficientSpec f = CoefficientSpec::zero()) {
    return Scenario::make(std::move(f), std::move(g), 1.0, History::constant(1.0), n, horizon);
}

}  // namespace

TEST_CASE("predictions per regime", "[analysis]") {
    const Prediction sub = predict(scenario(CoefficientSpec::power(1.0, 0.5), 10, 10.0));
    CHECK(sub.regime().kind == Regime::Kind::SublinearRV);
    CHECK(sub.observable() == Observable::FunctionalOverT);
    CHECK(sub.discrete_rate(0.1) == 1.0);
    CHECK(sub.discrete_rate(0.5) == 1.0);

    const Prediction rv1 = predict(scenario(CoefficientSpec::lin_times_exp_log_pow(1.0, 0.5), 4, 10.0));
    CHECK(rv1.regime().kind == Regime::Kind::RV1Superlinear);
    CHECK_THAT(*rv1.discrete_rate(0.25), WithinRel(0.8, 1e-15));
    CHECK(rv1.continuous_rate() == 1.0);
    CHECK_FALSE(rv1.notes.empty());

    const Prediction poly = predict(scenario(CoefficientSpec::power(1.0, 2.0), 4, 10.0));
    CHECK(poly.observable() == Observable::LogLogOverT);
    CHECK_THAT(*poly.discrete_rate(0.25), WithinAbs(0.554518, 1e-6));
    CHECK_THAT(poly.continuous_rate(), WithinRel(std::numbers::ln2, 1e-15));

    const Prediction lin = predict(scenario(CoefficientSpec::linear(1.0), 16, 10.0));
    CHECK(lin.observable() == Observable::LogOverT);
    CHECK_FALSE(lin.discrete_rate(0.1).has_value());
    CHECK(lin.target_rate(0.1) == lin.continuous_rate());

    const Prediction fast = predict(scenario(CoefficientSpec::exp_log_pow(1.0, 2.0), 8, 10.0));
    CHECK(fast.observable() == Observable::LogLogLogOverT);
    CHECK_FALSE(fast.discrete_rate(0.125).has_value());
}

TEST_CASE("observables evaluate the numerators", "[analysis]") {
    const Prediction poly = predict(scenario(CoefficientSpec::power(1.0, 2.0), 4, 10.0));
    CHECK_THAT(*poly.observe(LogReal::from_log(std::exp(3.0))), WithinRel(3.0, 1e-14));
    CHECK_FALSE(poly.observe(LogReal::from_log(-0.5)).has_value());

    const Prediction lin = predict(scenario(CoefficientSpec::linear(1.0), 16, 10.0));
    CHECK(*lin.observe(LogReal::from_log(42.0)) == 42.0);
}

TEST_CASE("predict refuses when a dominance hypothesis fails", "[analysis]") {
    try {
        (void)predict(CoefficientSpec::power(1.0, 0.9), CoefficientSpec::power(1.0, 0.5), 1.0);
        FAIL("expected PredictionRefused");
    } catch (const PredictionRefused& e) {
        CHECK(e.condition() == "f/g -> 0");
    }
    CHECK_THROWS_AS(predict(CoefficientSpec::power(1.0, 1.2), CoefficientSpec::power(1.0, 2.0), 1.0),
                    PredictionRefused);
    CHECK_THROWS_AS(predict(CoefficientSpec::zero(), CoefficientSpec::exp_log_pow(1.0, 0.5), 1.0), PredictionRefused);

    const Prediction ok = predict(CoefficientSpec::power(1.0, 0.5), CoefficientSpec::power(1.0, 2.0), 1.0);
    REQUIRE_FALSE(ok.hypotheses.empty());
    for (const HypothesisCheck& c : ok.hypotheses) {
        CHECK(c.holds());
    }
}

TEST_CASE("characteristic equation", "[analysis]") {
    CHECK_THAT(solve_char_eq(std::numbers::e, 1.0), WithinRel(1.0, 1e-14));
    // lambda = W(C tau) / tau.
    const double w1 = boost::math::lambert_w0(1.0);
    CHECK_THAT(solve_char_eq(1.0, 1.0), WithinAbs(w1, 1e-12));
    CHECK_THAT(solve_char_eq(1.0, 1e-9), WithinAbs(1.0, 1e-8));
    CHECK_THROWS_AS(solve_char_eq(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(solve_char_eq(1.0, -1.0), DomainError);
}

TEST_CASE("characteristic root is the unique sign change", "[analysis][property]") {
    for (const double C : {0.1, 0.5, 1.0, 2.0, 7.5, 40.0}) {
        for (const double tau : {0.01, 0.3, 1.0, 4.0}) {
            const double lambda = solve_char_eq(C, tau);
            const auto map = [&](double nu) { return nu - C * std::exp(-nu * tau); };
            INFO("C = " << C << " tau = " << tau);
            CHECK(std::abs(map(lambda)) <= 1e-12 * (1.0 + C));
            CHECK(map(0.0) < 0.0);
            CHECK(map(lambda - 1e-6) < 0.0);
            CHECK(map(lambda + 1e-6) > 0.0);
            CHECK_THAT(lambda, WithinRel(boost::math::lambert_w0(C * tau) / tau, 1e-11));
        }
    }
}

TEST_CASE("estimates on synthetic ratio sequences", "[analysis]") {
    const std::vector<double> flat(400, 0.5);
    const RateEstimate e = estimate_from_ratios(flat, 100);
    CHECK(e.point == 0.5);
    CHECK(e.dispersion == 0.0);
    CHECK(e.verdict == Verdict::Converged);
    CHECK(e.tail_start == 400);
    CHECK(e.tail_end == 499);

    std::vector<double> decaying;
    for (int n = 1000; n < 3000; ++n) {
        decaying.push_back(0.8 + 3.0 / n);
    }
    const RateEstimate d = estimate_from_ratios(decaying, 1000);
    CHECK_THAT(d.point, WithinAbs(0.8, 0.002));
    CHECK(d.verdict == Verdict::Converged);

    std::vector<double> oscillating;
    for (int n = 0; n < 400; ++n) {
        oscillating.push_back(n % 2 == 0 ? 1.0 : 2.0);
    }
    CHECK(estimate_from_ratios(oscillating, 0).verdict == Verdict::Inconclusive);

    std::vector<double> drifting;
    for (int n = 0; n < 400; ++n) {
        drifting.push_back(1.0 + 0.01 * n);
    }
    CHECK(estimate_from_ratios(drifting, 0).verdict == Verdict::Trending);

    const std::vector<double> short_run(99, 1.0);
    CHECK_THROWS_AS(estimate_from_ratios(short_run, 0), EstimationError);
}

TEST_CASE("warmup", "[analysis]") {
    CHECK(warmup_steps(1) == 100);
    CHECK(warmup_steps(10) == 100);
    CHECK(warmup_steps(64) == 640);
}

TEST_CASE("sublinear estimates do not depend on h", "[analysis][property]") {
    const VerifyOutcome fine = verify(scenario(CoefficientSpec::power(1.0, 0.5), 8, 2000.0));
    const VerifyOutcome coarse = verify(scenario(CoefficientSpec::power(1.0, 0.5), 2, 2000.0));
    CHECK(fine.passed);
    CHECK(coarse.passed);
    CHECK(std::abs(fine.estimate.point - coarse.estimate.point) < 0.02);
}

TEST_CASE("verify on the RV(1) and polynomial scenarios", "[analysis]") {
    const VerifyOutcome rv1 = verify(scenario(CoefficientSpec::lin_times_exp_log_pow(1.0, 0.5), 4, 400.0));
    CHECK(rv1.passed);
    CHECK(rv1.tolerance == 0.05);
    CHECK(rv1.relative_error() <= 0.05);

    const VerifyOutcome poly = verify(scenario(CoefficientSpec::power(1.0, 2.0), 4, 600.0));
    CHECK(poly.passed);
    CHECK_THAT(poly.estimate.point, WithinRel(std::numbers::ln2 / 1.25, 0.03));

    const VerifyOutcome strict = verify(scenario(CoefficientSpec::power(1.0, 2.0), 4, 600.0), 1e-6);
    CHECK_FALSE(strict.passed);
}

TEST_CASE("too few samples is an estimation error", "[analysis]") {
    CHECK_THROWS_AS(verify(scenario(CoefficientSpec::power(1.0, 0.5), 10, 15.0)), EstimationError);
}

TEST_CASE("iterated log slope of a fast trajectory", "[analysis]") {
    const auto s = scenario(CoefficientSpec::exp_log_pow(1.0, 2.0), 8, 40.0);
    const Trajectory traj = simulate_euler(s);
    REQUIRE(traj.truncated());
    const IteratedLogSlope slope = iterated_log_slope(traj, 3);
    CHECK(slope.increasing);
    CHECK(slope.first_n < slope.last_n);
    CHECK(slope.mean_slope > 0.0);
    CHECK(slope.fitted_slope > 0.0);

    const auto slow = scenario(CoefficientSpec::exp_log_pow(1.0, 2.0), 8, 0.5);
    CHECK_THROWS_AS(iterated_log_slope(simulate_euler(slow), 3), EstimationError);
}

TEST_CASE("envelope dominates the sublinear trajectory", "[analysis]") {
    const auto s = scenario(CoefficientSpec::power(1.0, 0.5), 10, 300.0);
    const EnvelopeSetup setup = envelope_setup(s, 0.5);
    CHECK(setup.params.eta_eps == 1.5);
    const Trajectory traj = simulate_euler(s);
    const EnvelopeResult r = envelope_check(s, traj, setup.params, setup.functional);
    CHECK(r.dominated);
    CHECK_FALSE(r.first_violation.has_value());
    CHECK(r.samples.size() == traj.size());
    for (const EnvelopeSample& sample : r.samples) {
        REQUIRE(sample.margin > 0.0);
    }

    std::ostringstream csv;
    write_envelope_csv(csv, r, s.h());
    CHECK(csv.str().rfind("n,t,log_envelope,log_x,margin,space\n", 0) == 0);
}

TEST_CASE("envelope rejects a constant that is too small", "[analysis]") {
    const auto s = scenario(CoefficientSpec::power(1.0, 0.5), 10, 50.0);
    EnvelopeSetup setup = envelope_setup(s, 0.5);
    setup.params.c_eps = 0.0;
    CHECK_THROWS_AS(envelope_check(s, simulate_euler(s), setup.params, setup.functional), PreconditionError);
}

TEST_CASE("envelope catches a trajectory that escapes", "[analysis]") {
    // A trajectory of a faster equation cannot stay under the envelope built for g = sqrt(x).
    const auto slow = scenario(CoefficientSpec::power(1.0, 0.5), 4, 200.0);
    const auto fast = scenario(CoefficientSpec::power(4.0, 0.5), 4, 200.0);
    const EnvelopeSetup setup = envelope_setup(slow, 0.5);
    const EnvelopeResult r = envelope_check(slow, simulate_euler(fast), setup.params, setup.functional);
    CHECK_FALSE(r.dominated);
    CHECK(r.first_violation.has_value());
}

TEST_CASE("sweep table", "[analysis]") {
    const auto s = scenario(CoefficientSpec::power(1.0, 2.0), 4, 600.0);
    const std::array<std::int64_t, 4> ns{1, 2, 4, 8};
    const SweepTable table = sweep_h(s, ns);
    REQUIRE(table.rows.size() == 4);
    const double hs[] = {1.0, 0.5, 0.25, 0.125};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(table.rows[i].h == hs[i]);
        CHECK_THAT(*table.rows[i].predicted, WithinRel(std::numbers::ln2 / (1.0 + hs[i]), 1e-14));
        if (i > 0) {
            CHECK(*table.rows[i].predicted > *table.rows[i - 1].predicted);
        }
    }
    CHECK_THAT(table.extrapolated, WithinRel(std::numbers::ln2, 0.03));

    std::ostringstream csv;
    write_sweep_csv(csv, table);
    CHECK(csv.str().rfind("h,N,predicted,estimated,dispersion,verdict\n1,1,", 0) == 0);
    CHECK(csv.str().find("\n0,,0.6931471805599453,") != std::string::npos);

    const std::array<std::int64_t, 2> too_few{1, 2};
    CHECK_THROWS_AS(sweep_h(s, too_few), PreconditionError);
}
