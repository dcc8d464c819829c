#pragma once

#include <stdexcept>
#include <string>

namespace eitcool {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario document (wrong type, missing or unknown field).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a physical invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Unknown preset or other name lookup failure.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a closed-form expression.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A formula was called on a scenario it does not apply to.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A_- <= A_+: no stationary cooling limit.
class HeatingRegimeError : public Error {
 public:
  using Error::Error;
};

/// Problem too large for the dense/sparse superoperator machinery.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Solver breakdown: singular systems, drift, inconsistent results.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NonUniqueSteadyStateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NearSingularError : public NumericalError {
 public:
  NearSingularError(const std::string& what, double rcond)
      : NumericalError(what), rcond_(rcond) {}
  double rcond() const { return rcond_; }

 private:
  double rcond_;
};

}  // namespace eitcool
