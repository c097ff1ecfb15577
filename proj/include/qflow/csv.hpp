// CSV artifact tables: fixed column order, header row, comma separators,
// and every floating-point value at 12 significant digits.

#pragma once

#include <string>
#include <vector>

namespace qflow {

// The one format every floating-point artifact value is printed with:
// scientific, 12 significant digits.
std::string format_sig(double x);

enum class ColumnKind { integer, real };

struct Table {
  std::vector<std::string> columns;
  std::vector<ColumnKind> kinds;
  std::vector<std::vector<double>> rows;

  Table() = default;
  Table(std::vector<std::string> cols, std::vector<ColumnKind> col_kinds);

  int column_index(const std::string& name) const;  // throws when absent
  double at(std::size_t row, const std::string& name) const;
  void append(std::vector<double> row);

  // Column-wise max |a - b| against another table with the same shape.
  double max_difference(const Table& other) const;
};

// Serialized cell values: integer columns as plain integers, real columns
// through format_sig.
std::string table_text(const Table& table);
void write_table(const std::string& path, const Table& table);

// Parses a written table back. Column kinds are inferred per column from the
// first data row (no '.', 'e', or 'n' marks an integer). Missing files and
// malformed cells are domain errors.
Table read_table(const std::string& path);

}  // namespace qflow
