#pragma once

#include <stdexcept>
#include <string>

namespace dyadlab {

/// Malformed inputs: bad sizes, exponents out of range, missing table entries.
struct MalformedInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Evaluation requested exactly at a non-integrable point.
struct SingularityError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A numerical routine could not reach the requested tolerance.
struct AccuracyError : std::runtime_error {
  double achieved;
  AccuracyError(const std::string& what, double achieved_tol)
      : std::runtime_error(what + " (achieved " + std::to_string(achieved_tol) + ")"),
        achieved(achieved_tol) {}
};

/// Work or integer-range budget exceeded (enumeration size, schedule overflow).
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A modulation schedule too small for the spectrum it must separate.
struct DominanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Caller violated a documented precondition.
struct PreconditionError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Non-finite values or other numeric breakdown inside an iteration.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two redundant internal computations disagree.
struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dyadlab
