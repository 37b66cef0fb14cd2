#pragma once

// CSV and manifest output. Every CSV starts with the line "# schema=1";
// reals are written with %.17g so they round-trip exactly.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "brw/experiments.hpp"
#include "brw/oracle.hpp"

namespace brw {

using Cell = std::variant<std::int64_t, double, std::string>;

std::string format_cell(const Cell& c);

class CsvWriter {
 public:
  /// Creates parent directories. Throws Error when the file cannot be opened.
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns);

  void row(const std::vector<Cell>& cells);

 private:
  std::ofstream out_;
  std::size_t width_;
};

/// <dir>/<id>.csv with one row per statistic and one per verdict,
/// <dir>/<id>_detail.csv when the report has replicate rows, and
/// <dir>/<id>_summary.txt.
void write_report(const std::filesystem::path& dir, const ExperimentReport& report);

std::string summary_text(const ExperimentReport& report);

void write_identity_checks(const std::filesystem::path& path, const std::vector<IdentityCheck>& checks);

/// <dir>/manifest.json.
void write_manifest(const std::filesystem::path& dir, const nlohmann::json& manifest);

}  // namespace brw
