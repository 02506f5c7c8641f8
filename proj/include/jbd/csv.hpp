#pragma once

#include <string>
#include <utility>
#include <vector>

namespace jbd {

/// Column-schema'd numeric table written out as CSV.
///
/// Values are formatted with 17 significant digits so that reading them back
/// reproduces the exact double. An empty table with preset columns yields a
/// header-only file.
struct TraceTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Appends a named record. The first record fixes the column schema when
  /// none was preset; later records must carry the same names in the same
  /// order or SchemaError is thrown.
  void append(const std::vector<std::pair<std::string, double>>& record);
};

void write_csv_trace(const TraceTable& table, const std::string& path);

/// %.17g rendering used for all numeric file output.
std::string format_g17(double v);

}  // namespace jbd
