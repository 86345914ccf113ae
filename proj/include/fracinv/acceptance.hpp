#pragma once

// End-to-end acceptance suite at reference resolutions. Shared by the
// command-line selftest and the acceptance test binary.

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace fracinv::acceptance {

struct Options {
  /// Test hook: the Weyl-law criterion assembles its operator from a
  /// truncated weight sequence.
  bool corrupt_weights = false;
};

struct Result {
  int id;
  std::string name;
  bool passed;
  std::string measured;
  double seconds;
};

Result example_nonlocal(const Options& options);
Result example_point_datum(const Options& options);
Result double_datum(const Options& options);
Result source_roundtrip(const Options& options);
Result weyl_law(const Options& options);
Result kernel_accuracy(const Options& options);
Result convergence_orders(const Options& options);
Result property_suites(const Options& options);

/// Runs every criterion in order, printing one line per criterion as soon
/// as it finishes.
std::vector<Result> run_all(const Options& options, std::ostream& out);

std::string format_line(const Result& result);

}  // namespace fracinv::acceptance
