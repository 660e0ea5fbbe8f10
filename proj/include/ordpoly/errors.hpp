#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ordpoly {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad file syntax, unknown variable names, values out of range.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the constraint set does not hold (ties present, variable is exact, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The constraint set admits no possible world.
class InconsistentError : public Error {
 public:
  InconsistentError(std::string what, std::vector<std::string> witness)
      : Error(std::move(what)), witness_(std::move(witness)) {}

  const std::vector<std::string>& witness() const noexcept { return witness_; }

 private:
  std::vector<std::string> witness_;
};

/// An enumeration or memory limit was reached.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// The requested engine does not support the shape of the constraint set.
class UnsupportedShapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace ordpoly
