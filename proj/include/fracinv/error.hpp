#pragma once

#include <stdexcept>
#include <string>

namespace fracinv {

// Three failure classes; the CLI maps each to one exit code (1, 2, 3).

/// Bad input: invalid parameters, length mismatches, malformed config.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation could not produce a trustworthy number.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Data violate a hypothesis the inverse problem needs (point datum
/// assumptions (i)-(iii), nonlocal solvability conditions, double-datum
/// non-vanishing source).
class AssumptionViolation : public std::runtime_error {
 public:
  AssumptionViolation(std::string assumption, const std::string& detail)
      : std::runtime_error("assumption " + assumption + " violated: " + detail),
        assumption_(std::move(assumption)) {}

  const std::string& assumption() const noexcept { return assumption_; }

 private:
  std::string assumption_;
};

}  // namespace fracinv
