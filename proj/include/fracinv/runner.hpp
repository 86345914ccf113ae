#pragma once

#include "fracinv/config.hpp"

#include <exception>
#include <filesystem>
#include <ostream>

namespace fracinv {

/// Exit status of a run.
enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,       ///< bad flags, config or input files
  exit_numerical = 2,   ///< numerical failure, or a failed selftest criterion
  exit_assumption = 3,  ///< the data violate a hypothesis of the recovery theory
};

/// Maps an exception to its exit code.
int exit_code_for(const std::exception& error);

struct RunOptions {
  /// Test hook forwarded to the selftest.
  bool corrupt_weights = false;
  std::ostream* log = nullptr;
};

/// Dispatches the configured problem, writes its CSV artifacts and
/// report.json into out_dir and returns the exit code. Errors raised while
/// solving are reported in report.json as well.
int run(const RunConfig& config, const std::filesystem::path& out_dir, const RunOptions& options = {});

}  // namespace fracinv
