#include "qflow/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qflow/errors.hpp"

namespace qflow {

std::string format_sig(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", x);
  return buf;
}

Table::Table(std::vector<std::string> cols, std::vector<ColumnKind> col_kinds)
    : columns(std::move(cols)), kinds(std::move(col_kinds)) {
  if (columns.size() != kinds.size())
    throw DomainError("table needs one kind per column");
  if (columns.empty()) throw DomainError("table needs at least one column");
}

int Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  throw DomainError("table has no column '" + name + "'");
}

double Table::at(std::size_t row, const std::string& name) const {
  if (row >= rows.size())
    throw DomainError("table row " + std::to_string(row) + " out of range");
  return rows[row][column_index(name)];
}

void Table::append(std::vector<double> row) {
  if (row.size() != columns.size())
    throw DomainError("table row has " + std::to_string(row.size()) +
                      " cells; expected " + std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

double Table::max_difference(const Table& other) const {
  if (columns != other.columns || rows.size() != other.rows.size())
    throw DomainError("cannot compare tables with different shapes");
  double worst = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < columns.size(); ++c)
      worst = std::max(worst, std::abs(rows[r][c] - other.rows[r][c]));
  return worst;
}

std::string table_text(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out += (c ? "," : "") + table.columns[c];
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ",";
      if (table.kinds[c] == ColumnKind::integer)
        out += std::to_string(std::llround(row[c]));
      else
        out += format_sig(row[c]);
    }
    out += "\n";
  }
  return out;
}

void write_table(const std::string& path, const Table& table) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write table '" + path + "'");
  out << table_text(table);
  if (!out) throw DomainError("failed while writing table '" + path + "'");
}

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open table '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw DomainError("table '" + path + "' is empty");

  Table table;
  std::istringstream header(line);
  std::string cell;
  while (std::getline(header, cell, ',')) table.columns.push_back(cell);
  if (table.columns.empty())
    throw DomainError("table '" + path + "' has no columns");

  bool kinds_set = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row_in(line);
    std::vector<double> row;
    std::vector<ColumnKind> kinds;
    while (std::getline(row_in, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = std::string::npos;
      }
      if (cell.empty() || used != cell.size())
        throw DomainError("table '" + path + "' has a malformed cell: '" +
                          cell + "'");
      row.push_back(v);
      kinds.push_back(cell.find_first_of(".eE") == std::string::npos
                          ? ColumnKind::integer
                          : ColumnKind::real);
    }
    if (row.size() != table.columns.size())
      throw DomainError("table '" + path + "' has a ragged row");
    if (!kinds_set) {
      table.kinds = std::move(kinds);
      kinds_set = true;
    }
    table.rows.push_back(std::move(row));
  }
  if (!kinds_set)
    table.kinds.assign(table.columns.size(), ColumnKind::real);
  return table;
}

}  // namespace qflow
