#include "jbd/csv.hpp"

#include <cstdio>
#include <fstream>

#include "jbd/errors.hpp"

namespace jbd {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void TraceTable::append(const std::vector<std::pair<std::string, double>>& record) {
  if (columns.empty() && rows.empty()) {
    columns.reserve(record.size());
    for (const auto& [name, value] : record) {
      (void)value;
      columns.push_back(name);
    }
  }
  if (record.size() != columns.size())
    throw SchemaError("record has " + std::to_string(record.size()) + " fields, schema has " +
                      std::to_string(columns.size()));
  std::vector<double> row;
  row.reserve(record.size());
  for (std::size_t i = 0; i < record.size(); ++i) {
    if (record[i].first != columns[i])
      throw SchemaError("record field '" + record[i].first + "' does not match column '" +
                        columns[i] + "'");
    row.push_back(record[i].second);
  }
  rows.push_back(std::move(row));
}

void write_csv_trace(const TraceTable& table, const std::string& path) {
  if (table.columns.empty()) throw SchemaError("trace table has no columns");
  for (const auto& row : table.rows)
    if (row.size() != table.columns.size())
      throw SchemaError("row width does not match column count");

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ',';
    out << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_g17(row[i]);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace jbd
