#include "brw/output.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "brw/error.hpp"

namespace brw {

std::string format_cell(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isnan(*d)) return "nan";
    if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns) : width_(columns.size()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error("cannot write " + path.string());
  out_ << "# schema=1\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != width_) throw Error("csv row has " + std::to_string(cells.size()) + " cells, expected " +
                                          std::to_string(width_));
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << format_cell(cells[i]);
  out_ << '\n';
}

std::string summary_text(const ExperimentReport& r) {
  std::ostringstream os;
  os << "experiment: " << r.id << "\n";
  for (const auto& [k, v] : r.parameters) os << "  " << k << " = " << v << "\n";
  os << "statistics:\n";
  for (const auto& s : r.stats) {
    os << "  " << s.name << " n=" << s.n;
    if (s.param != 0.0) os << " param=" << s.param;
    os << "  " << s.point;
    if (s.replicates > 0) os << " +- " << s.std_error << " (" << s.replicates << " replicates)";
    if (!std::isnan(s.reference)) os << "  reference " << s.reference;
    os << "\n";
  }
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  os << "verdicts:\n";
  for (const auto& v : r.verdicts) os << "  " << (v.pass ? "PASS" : "FAIL") << "  " << v.name << "  [" << v.detail << "]\n";
  os << "overall: " << (r.passed() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

void write_report(const std::filesystem::path& dir, const ExperimentReport& r) {
  {
    CsvWriter csv(dir / (r.id + ".csv"),
                  {"experiment", "kind", "name", "n", "param", "point", "std_error", "replicates", "reference", "pass"});
    for (const auto& s : r.stats)
      csv.row({r.id, std::string("statistic"), s.name, std::int64_t{s.n}, s.param, s.point, s.std_error,
               std::int64_t{s.replicates}, s.reference, std::string()});
    for (const auto& v : r.verdicts)
      csv.row({r.id, std::string("verdict"), v.name + " [" + v.detail + "]", std::int64_t{0}, 0.0, std::nan(""),
               std::nan(""), std::int64_t{0}, std::nan(""), std::string(v.pass ? "true" : "false")});
  }
  if (!r.detail.rows.empty()) {
    CsvWriter csv(dir / (r.id + "_detail.csv"), r.detail.columns);
    for (const auto& row : r.detail.rows) {
      std::vector<Cell> cells;
      for (std::size_t i = 0; i < row.size(); ++i) {
        // Integer-valued index columns are written as integers.
        const bool integral = r.detail.columns[i] == "replicate" || r.detail.columns[i] == "n";
        cells.push_back(integral ? Cell{static_cast<std::int64_t>(row[i])} : Cell{row[i]});
      }
      csv.row(cells);
    }
  }
  std::ofstream txt(dir / (r.id + "_summary.txt"), std::ios::binary | std::ios::trunc);
  txt << summary_text(r);
}

void write_identity_checks(const std::filesystem::path& path, const std::vector<IdentityCheck>& checks) {
  CsvWriter csv(path, {"identity", "parameters", "lhs", "rhs", "residual", "pass"});
  for (const auto& c : checks)
    csv.row({c.identity, c.parameters, c.lhs, c.rhs, c.residual, std::string(c.pass ? "true" : "false")});
}

void write_manifest(const std::filesystem::path& dir, const nlohmann::json& manifest) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

}  // namespace brw
