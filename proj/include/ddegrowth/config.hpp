#pragma once

// Flat `key = value` run configuration, one scenario per file. '#' starts a
// comment; blank lines are ignored.

#include "ddegrowth/coefficients.hpp"
#include "ddegrowth/simulator.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddegrowth {

/// Parse or validation failure; the message carries `source:line:`.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Command { Simulate, Predict, Verify, Sweep, Chareq, Envelope };

[[nodiscard]] std::optional<Command> parse_command(std::string_view text);
[[nodiscard]] std::string to_string(Command c);

struct RunConfig {
    std::optional<Command> command;
    CoefficientSpec f;
    std::optional<CoefficientSpec> g;
    std::optional<double> tau;
    History psi = History::constant(1.0);
    std::vector<std::int64_t> step_ns;
    std::optional<double> horizon;
    std::optional<std::string> out;
    std::optional<double> tol;
    /// chareq only.
    std::optional<double> C;
    /// envelope only; defaults to 0.5.
    std::optional<double> eps;
};

/// Applies one `key = value` line to cfg; throws ConfigError prefixed with
/// `where`.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, const std::string& where);

/// Reads a whole config file.
[[nodiscard]] RunConfig parse_config(std::istream& in, const std::string& source);
[[nodiscard]] RunConfig load_config(const std::string& path);

/// The scenario for the index-th entry of N (the only one for non-sweep
/// commands). Throws ConfigError naming the first missing key or violated
/// requirement.
[[nodiscard]] Scenario to_scenario(const RunConfig& cfg, std::size_t index = 0);

}  // namespace ddegrowth
