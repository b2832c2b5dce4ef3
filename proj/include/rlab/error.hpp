#pragma once

#include <stdexcept>
#include <string>

namespace rlab {

/// Bad input: violated precondition, inadmissible parameter, malformed file.
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation would exceed its configured memory or enumeration budget.
/// The CLI maps this to exit code 3.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sampling grid cannot represent the band it is asked to carry.
class ResolutionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Direct search did not reach the requested tolerance.
class BisectError : public std::runtime_error {
 public:
  BisectError(const std::string& what, double best) : std::runtime_error(what), best_imbalance(best) {}
  double best_imbalance;
};

}  // namespace rlab
