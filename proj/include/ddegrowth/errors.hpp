#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ddegrowth {

/// Argument outside the mathematical domain of an operation (c <= 0 in a
/// log-scale, log-argument below a coefficient's threshold, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A documented precondition of an operation does not hold for the input
/// (wrong regime for the undelayed oracle, ill-defined envelope constants).
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Quadrature failed to converge, or a result left the representable range.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bracket expansion or a log-domain value ran past the representable horizon.
class HorizonError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Coefficient evaluation failed while integrating; carries the step index.
class SimulationError : public std::runtime_error {
public:
    SimulationError(std::int64_t step, const std::string& what)
        : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}

    [[nodiscard]] std::int64_t step() const noexcept { return step_; }

private:
    std::int64_t step_;
};

/// Rate estimation impossible (trajectory too short, observable undefined).
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ddegrowth
