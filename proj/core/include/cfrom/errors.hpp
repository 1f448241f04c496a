#pragma once

#include <stdexcept>
#include <string>

namespace cfrom {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: invalid mesh, out-of-range rank, malformed config.
/// Tools map this family to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

class InvalidMeshError : public InputError {
public:
    using InputError::InputError;
};

class RangeError : public InputError {
public:
    using InputError::InputError;
};

class ShapeError : public InputError {
public:
    using InputError::InputError;
};

/// Requested time is not a node of the trajectory grid.
class LookupError : public InputError {
public:
    using InputError::InputError;
};

class ConfigError : public InputError {
public:
    using InputError::InputError;
};

class IoError : public InputError {
public:
    using InputError::InputError;
};

/// Numerical failure during a solve. Tools map this family to exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

class NonConvergenceError : public NumericalError {
public:
    NonConvergenceError(const std::string& what, double last_residual)
        : NumericalError(what), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// NaN or Inf in the FOM state.
class DivergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// NaN or Inf in a ROM trajectory.
class BlowUpError : public NumericalError {
public:
    BlowUpError(const std::string& what, long step)
        : NumericalError(what), step_(step) {}

    long step() const noexcept { return step_; }

private:
    long step_;
};

class EmptyBasisError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateDataError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace cfrom
