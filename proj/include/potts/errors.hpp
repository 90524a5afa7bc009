#pragma once

#include <stdexcept>
#include <string>

namespace potts {

/// Base class for every error raised by the library. The CLI maps these to
/// exit code 1 (domain error).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (dimension mismatch, bad input).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Model or algorithm parameters outside their admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// An exhaustive computation would exceed its enumeration guard.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Rejection sampling ran out of attempts.
class SamplingFailure : public Error {
public:
    using Error::Error;
};

/// Iterative numerical routine failed to reach its tolerance.
class NumericError : public Error {
public:
    NumericError(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace potts
