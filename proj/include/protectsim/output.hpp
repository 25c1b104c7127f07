#pragma once

// JSON/CSV renderings of results. Every document carries "schema": "v1" and
// the caller-supplied config block (which includes the seed).

#include <string>
#include <vector>

#include <json.hpp>

#include "protectsim/protect.hpp"
#include "protectsim/qnd.hpp"

namespace protectsim::output {

using json = nlohmann::json;

// Shortest round-trip decimal form.
std::string format_double(double v);

json to_json(const protect::ProtectiveRunResult& r);
json to_json(const stats::PowerLawFit& f);
json to_json(const protect::ScanResult& s);
json to_json(const protect::SpreadingReport& r);
json to_json(const protect::SeriesResult& s);
json to_json(const qnd::QndTrace& t);
json to_json(const qnd::EstimatorSummary& s);
json to_json(const qnd::EnsembleComparison& e);

// {"schema": "v1", "command": ..., "config": ..., "result": ...}
json document(const std::string& command, const json& config, json result);

// CSV tables. Leading "# key: value" lines carry the config and fit blocks.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void comment(const std::string& key, const json& value);
  void row(const std::vector<double>& values);
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<std::vector<double>> rows_;
};

CsvTable trajectory_csv(const std::vector<protect::TrajectoryRow>& rows);
CsvTable scan_csv(const protect::ScanResult& s);
CsvTable series_csv(const protect::SeriesResult& s);
CsvTable traces_csv(const std::vector<qnd::QndTrace>& traces);

}  // namespace protectsim::output
