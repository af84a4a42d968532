#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace chacs {

/// Bad caller input: odd dictionary length, K > N, zero denominators and similar.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Two objects that must agree on a length do not.
class DimensionMismatch : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Downsampling would produce no measurements (lambda > N).
class EmptyMeasurement : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Base for failures of the numerics rather than of the inputs.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A map orbit left the divergence bound or produced a non-finite value.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, long step)
        : NumericalError(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    long step() const noexcept { return step_; }

private:
    long step_;
};

/// No scale in the halving schedule kept the excited orbit bounded.
class ScalingFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The inner solver could not produce a finite trial point. Carries the last
/// accepted iterate so callers can still report a partial result.
class SolverStall : public NumericalError {
public:
    SolverStall(const std::string& what, std::vector<double> last_iterate)
        : NumericalError(what), last_iterate_(std::move(last_iterate)) {}

    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

private:
    std::vector<double> last_iterate_;
};

} // namespace chacs
