// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace fadecast {

/// Comma-separated table with leading `# ` comment lines. Comments of the
/// form `key=value` act as metadata. Fields never contain commas.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Index of a column; throws FormatError when absent.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
  const std::string& text(std::size_t row, const std::string& name) const;
  /// Value of the first `key=value` comment, or empty.
  std::string meta(const std::string& key) const;
  void add_row(std::vector<std::string> row);
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const CsvTable& t);
void write_csv_file(const std::string& path, const CsvTable& t);

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

}  // namespace fadecast
