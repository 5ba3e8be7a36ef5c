#pragma once

// Plain-text summaries: one `label: value` line per fact, stable across runs.

#include "ddegrowth/analysis.hpp"

#include <iosfwd>

namespace ddegrowth {

void write_prediction_report(std::ostream& out, const Scenario& s, const Prediction& p);

/// Prediction block followed by the estimate, target and PASS/FAIL line.
void write_verify_report(std::ostream& out, const Scenario& s, const VerifyOutcome& v);

void write_envelope_report(std::ostream& out, const Scenario& s, const EnvelopeSetup& setup,
                           const EnvelopeResult& result);

}  // namespace ddegrowth
