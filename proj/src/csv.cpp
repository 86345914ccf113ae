#include "fracinv/csv.hpp"

#include "fracinv/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fracinv::csv {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return c;
  }
  throw UsageError("CSV table has no column '" + name + "'");
}

std::vector<double> Table::values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[c]);
  return out;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write(const std::filesystem::path& path, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw UsageError("CSV header and column count differ");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& col : columns) {
    if (col.size() != rows) throw UsageError("CSV columns have different lengths");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << format_number(columns[c][r]);
    out << '\n';
  }
  if (!out) throw UsageError("failed while writing " + path.string());
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open CSV file " + path.string());
  Table table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (table.header.empty()) {
      table.header = cells;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(table.header.size()) + " fields, found " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (const auto& cell : cells) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw UsageError(path.string() + ":" + std::to_string(line_no) + ": '" + cell + "' is not a number");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw UsageError("CSV file " + path.string() + " has no header");
  return table;
}

}  // namespace fracinv::csv
