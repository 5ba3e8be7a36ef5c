#include "ddegrowth/report.hpp"

#include "ddegrowth/numfmt.hpp"

#include <algorithm>
#include <ostream>

namespace ddegrowth {

void write_prediction_report(std::ostream& out, const Scenario& s, const Prediction& p) {
    out << "scenario: " << s.to_string() << '\n';
    out << "regime: " << p.regime().to_string() << '\n';
    for (const HypothesisCheck& h : p.hypotheses) {
        out << "hypothesis " << h.condition << ": " << (h.holds() ? "holds" : "fails") << " ("
            << h.verdict.to_string() << ")\n";
    }
    out << "functional: " << p.functional().describe() << '\n';
    out << "observable: " << to_string(p.observable()) << '\n';
    out << "continuous rate: " << format_double(p.continuous_rate()) << '\n';
    out << "discrete rate (h=" << format_double(s.h()) << "): ";
    if (const auto d = p.discrete_rate(s.h())) {
        out << format_double(*d) << '\n';
    } else {
        out << "unavailable\n";
    }
    for (const std::string& note : p.notes) {
        out << "note: " << note << '\n';
    }
}

void write_verify_report(std::ostream& out, const Scenario& s, const VerifyOutcome& v) {
    write_prediction_report(out, s, v.prediction);
    out << "estimate: " << format_double(v.estimate.point) << " (tail n=" << v.estimate.tail_start << ".."
        << v.estimate.tail_end << ", dispersion " << format_double(v.estimate.dispersion) << ", "
        << to_string(v.estimate.verdict) << ")\n";
    out << "truncated: " << (v.truncated ? "yes" : "no") << '\n';
    out << "target: " << format_double(v.target) << '\n';
    out << "tolerance: " << format_double(v.tolerance);
    if (v.slack > 0.0) {
        out << " relative + " << format_double(v.slack) << " absolute";
    }
    out << '\n';
    out << "relative error: " << format_double(v.relative_error()) << '\n';
    out << "verdict: " << (v.passed ? "PASS" : "FAIL") << '\n';
}

void write_envelope_report(std::ostream& out, const Scenario& s, const EnvelopeSetup& setup,
                           const EnvelopeResult& result) {
    out << "scenario: " << s.to_string() << '\n';
    out << "functional: " << setup.functional.describe() << '\n';
    out << "epsilon: " << format_double(setup.params.epsilon) << '\n';
    out << "eta(eps): " << format_double(setup.params.eta_eps) << '\n';
    out << "log x1: " << format_double(setup.log_x1) << '\n';
    out << "log x2: " << format_double(setup.log_x2) << '\n';
    out << "c(eps): " << format_double(setup.params.c_eps) << '\n';
    out << "steps compared in functional space: " << result.functional_space_steps << '\n';
    if (!result.samples.empty()) {
        const auto worst = std::min_element(result.samples.begin(), result.samples.end(),
                                            [](const EnvelopeSample& a, const EnvelopeSample& b) {
                                                return a.margin < b.margin;
                                            });
        out << "smallest margin: " << format_double(worst->margin) << " at n=" << worst->n << '\n';
    }
    if (result.first_violation) {
        out << "first violation: n=" << *result.first_violation << '\n';
    }
    out << "dominated: " << (result.dominated ? "true" : "false") << '\n';
}

}  // namespace ddegrowth
