#pragma once

#include <string>

#include "homscore/dataset.hpp"
#include "homscore/report.hpp"
#include "homscore/simharness.hpp"

namespace homscore {

// Parses CSV with header `cluster,y,x1..xp,z1..zq[,trials]`. Rows are
// grouped by cluster id, clusters ordered by first appearance; parsing is
// locale-independent. Malformed input raises DataError with the offending
// line and column.
Dataset load_dataset(const std::string& path);

std::string report_to_json(const TestReport& report);
TestReport report_from_json(const std::string& json_text);

std::string rate_table_to_csv(const RateTable& table);

// Atomic writes: temp file in the target directory, then rename.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

inline void write_report(const std::string& path, const TestReport& report) {
  write_text_file(path, report_to_json(report));
}
inline TestReport read_report(const std::string& path) {
  return report_from_json(read_text_file(path));
}
inline void write_rate_table(const std::string& path, const RateTable& table) {
  write_text_file(path, rate_table_to_csv(table));
}

}  // namespace homscore
