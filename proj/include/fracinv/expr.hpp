#pragma once

// Arithmetic expressions in x and t used to describe problem data in
// config files, e.g. "exp(-lambda1*t)" or "(1 + sin(t)^2)*exp(-x^2)".
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | atom ('^' factor)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//
// '^' is right-associative and binds tighter than a leading minus, so
// "-x^2" is -(x^2) and "2^3^2" is 2^9. Identifiers come from a closed set:
// variables x, t; constants pi, lambda1; functions sin, cos, exp, sqrt, abs.

#include "fracinv/error.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace fracinv::expr {

class ParseError : public UsageError {
 public:
  ParseError(std::size_t offset, const std::string& message);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Values for the free symbols. lambda1 is bound by callers to the discrete
/// first eigenvalue once the spectrum exists.
struct Bindings {
  std::optional<double> x;
  std::optional<double> t;
  std::optional<double> lambda1;
};

enum class Symbol { x, t, lambda1 };

class Expr {
 public:
  struct Node;

  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

  /// Throws UsageError for an unbound symbol and NumericalFailure for
  /// division by zero, domain errors or non-finite intermediate results.
  double evaluate(const Bindings& bindings) const;

  /// Canonical text with minimal parentheses; parse(to_string()) rebuilds an
  /// equivalent tree.
  std::string to_string() const;

  bool uses(Symbol symbol) const;

  const Node& root() const noexcept { return *root_; }

 private:
  std::shared_ptr<const Node> root_;
};

Expr parse(std::string_view source);

}  // namespace fracinv::expr
