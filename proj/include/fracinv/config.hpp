#pragma once

// JSON run configuration for the command-line front end.
//
// Data entries take one of these forms:
//   "sin(pi*x)"                                   expression
//   {"eigenfunction": 1}                          discrete eigenvector φ_1
//   {"eigenfunction": 1, "time": "exp(-t)"}       φ_1(x)·g(t)
//   {"csv": "path.csv"}                           tabulated data
//   {"expr": "exp(-lambda1*t)", "scale_by_phi_at_q": true}
//   {"from_coefficient": "cos(t)"}                datum generated by a forward solve

#include "fracinv/expr.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace fracinv {

enum class ProblemKind { spectrum, forward, invert_single, invert_nonlocal, invert_double, invert_source, selftest };

std::string to_string(ProblemKind kind);

struct DataSpec {
  enum class Kind { expression, eigenfunction, csv };
  Kind kind = Kind::expression;
  std::optional<expr::Expr> expression;
  std::size_t eigenfunction = 0;  ///< 1-based
  std::optional<expr::Expr> time_factor;
  std::filesystem::path csv;
  bool scale_by_phi_at_q = false;
  std::optional<expr::Expr> from_coefficient;

  /// Text form for reports.
  std::string describe() const;
};

struct RunConfig {
  ProblemKind problem = ProblemKind::spectrum;
  double s = 0.5;
  double a = -1.0;
  double b = 1.0;
  std::size_t n = 256;
  double half_width = 40.0;
  std::size_t line_nodes = 1024;
  double horizon = 1.0;
  std::size_t steps = 400;
  std::optional<double> q;
  std::optional<DataSpec> phi;
  std::optional<DataSpec> f;
  std::optional<DataSpec> p;
  std::optional<DataSpec> w;
  std::optional<DataSpec> omega;
  std::optional<DataSpec> psi;
  std::optional<DataSpec> w1;
  std::optional<DataSpec> w2;
  double compat_tol = 1e-6;
  std::size_t modes = 0;
  std::optional<std::filesystem::path> output;
  nlohmann::json source;  ///< the document as read
};

/// Validates the document: known keys only, numeric ranges, parseable
/// expressions, existing files, and the fields each problem kind needs.
/// Relative CSV paths are resolved against base_dir. Every failure is a
/// UsageError whose message names the offending field.
RunConfig parse_config(const nlohmann::json& document, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace fracinv
