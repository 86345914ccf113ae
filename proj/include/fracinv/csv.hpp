#pragma once

// Numeric CSV tables with a mandatory header row. Values are written with
// 17 significant digits so they round-trip exactly.

#include <filesystem>
#include <string>
#include <vector>

namespace fracinv::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column; throws UsageError if absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

/// columns[c][r] is row r of column c; all columns must have equal length.
void write(const std::filesystem::path& path, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& columns);

/// Throws UsageError on a missing file, a malformed number or a ragged row.
Table read(const std::filesystem::path& path);

std::string format_number(double v);

}  // namespace fracinv::csv
