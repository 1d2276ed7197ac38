#pragma once

#include <stdexcept>
#include <string>

namespace rlvi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates an operation's preconditions (non-finite values, bad
/// shapes, out-of-range parameters).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Weighted least squares or another linear solve hit a rank-deficient system.
class SingularFit : public Error {
 public:
  using Error::Error;
};

/// An iterative fit stopped without meeting its stopping rule.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Bracketing or root-finding failed (constrained E-step).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// The E-step collapsed to the all-corrupted boundary where no estimate exists.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written, or its contents are malformed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rlvi
