#pragma once

#include <stdexcept>
#include <string>

namespace remsamp {

/// Bad parameter or configuration value.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A quadrature or recursion produced a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The threshold root function has no sign change on (0, sqrt(3 beta)].
/// Raised for beta below the feasible range; the outer bisection reads it
/// as a positive epoch value.
class NoRootError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A bracket could not be established or an iteration budget ran out.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace remsamp
