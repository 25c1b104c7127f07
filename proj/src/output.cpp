#include "protectsim/output.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "protectsim/errors.hpp"

namespace protectsim::output {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

json number(double v) {
  // JSON has no inf/nan; keep them visible as strings.
  if (std::isfinite(v)) return v;
  return format_double(v);
}

json optional_number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

}  // namespace

json to_json(const protect::ProtectiveRunResult& r) {
  return {{"T", r.T},
          {"slices", r.slices},
          {"pointer_mean_before", r.pointer_mean_before},
          {"pointer_mean_after", r.pointer_mean_after},
          {"pointer_shift", r.pointer_shift},
          {"predicted_shift", optional_number(r.predicted_shift)},
          {"pointer_width_before", r.pointer_width_before},
          {"pointer_width_after", r.pointer_width_after},
          {"apparatus_width_before", r.apparatus_width_before},
          {"apparatus_width_after", r.apparatus_width_after},
          {"system_fidelity", r.system_fidelity},
          {"orthogonal_probability", r.orthogonal_probability},
          {"truncation_population", r.truncation_population},
          {"warnings", r.warnings}};
}

json to_json(const stats::PowerLawFit& f) {
  return {{"exponent", f.exponent},
          {"exponent_stderr", f.exponent_stderr},
          {"coefficient", f.coefficient},
          {"residual_rms", f.residual_rms},
          {"points", f.points}};
}

json to_json(const protect::ScanResult& s) {
  json rows = json::array();
  for (const auto& r : s.runs) rows.push_back(to_json(r));
  return {{"Ts", s.Ts},
          {"runs", rows},
          {"fit", s.orthogonal_fit ? to_json(*s.orthogonal_fit) : json(nullptr)},
          {"shift_error_fit", s.shift_error_fit ? to_json(*s.shift_error_fit) : json(nullptr)}};
}

json to_json(const protect::SpreadingReport& r) {
  return {{"T", r.T},
          {"measured_width2", r.measured_width2},
          {"predicted_width2", r.predicted_width2},
          {"relative_error", r.relative_error}};
}

json to_json(const protect::SeriesResult& s) {
  const double mean = s.running_mean.empty() ? 0.0 : s.running_mean.back();
  double se = 0.0;
  if (s.differences.size() >= 2) {
    se = std::sqrt(stats::variance(s.differences) / static_cast<double>(s.differences.size()));
  }
  return {{"seed", s.seed},
          {"bin_width", s.bin_width},
          {"shots", s.differences.size()},
          {"mean_difference", mean},
          {"standard_error", se},
          {"final_system_fidelity", s.system_fidelity.empty() ? 1.0 : s.system_fidelity.back()},
          {"readings", s.readings},
          {"differences", s.differences},
          {"running_mean", s.running_mean},
          {"system_fidelity", s.system_fidelity}};
}

json to_json(const qnd::QndTrace& t) {
  json post = json::array();
  for (const auto& p : t.posteriors) post.push_back({{"k", p.k}, {"mean", p.mean}, {"variance", p.variance}});
  return {{"seed", t.seed},
          {"params", {{"n0", t.params.n0}, {"var0", t.params.var0}, {"var_m", t.params.var_m}, {"k", t.params.k}}},
          {"readings", t.readings},
          {"mean", t.mean},
          {"spread", t.spread},
          {"S", t.S},
          {"posteriors", post}};
}

json to_json(const qnd::EstimatorSummary& s) {
  return {{"traces", s.traces},
          {"alpha", s.alpha},
          {"rel_tol", s.rel_tol},
          {"mean_of_mean", s.mean_of_mean},
          {"mean_standard_error", s.mean_standard_error},
          {"mean_centered", s.mean_centered},
          {"variance_of_mean", s.variance_of_mean},
          {"expected_variance_of_mean", s.expected_variance_of_mean},
          {"variance_of_mean_ok", s.variance_of_mean_ok},
          {"mean_spread", s.mean_spread},
          {"spread_centered", s.spread_centered},
          {"ks_statistic", s.ks_statistic},
          {"ks_p_value", s.ks_p_value},
          {"ks_ok", s.ks_ok},
          {"center_variance", s.center_variance},
          {"expected_center_variance", s.expected_center_variance},
          {"center_diffusion_ok", s.center_diffusion_ok},
          {"posterior_variance", qnd::posterior_variance_closed_form(s.params.var0, s.params.var_m, s.params.k)},
          {"all_ok", s.all_ok()}};
}

json to_json(const qnd::EnsembleComparison& e) {
  return {{"c", e.c}, {"T", e.T}, {"X_perp", e.x_perp}, {"N_p", number(e.n_p)},
          {"eps_p", e.eps_p}, {"N_c", number(e.n_c)}};
}

json document(const std::string& command, const json& config, json result) {
  return {{"schema", "v1"}, {"command", command}, {"config", config}, {"result", std::move(result)}};
}

void CsvTable::comment(const std::string& key, const json& value) {
  comments_.push_back("# " + key + ": " + value.dump());
}

void CsvTable::row(const std::vector<double>& values) {
  if (values.size() != columns_.size()) throw ConfigError("csv row width does not match the header");
  rows_.push_back(values);
}

std::string CsvTable::str() const {
  std::ostringstream os;
  for (const auto& c : comments_) os << c << '\n';
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
  os << '\n';
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
    os << '\n';
  }
  return os.str();
}

CsvTable trajectory_csv(const std::vector<protect::TrajectoryRow>& rows) {
  CsvTable t({"time", "pointer_mean", "system_fidelity", "norm"});
  for (const auto& r : rows) t.row({r.time, r.pointer_mean, r.system_fidelity, r.norm});
  return t;
}

CsvTable scan_csv(const protect::ScanResult& s) {
  CsvTable t({"T", "slices", "pointer_shift", "predicted_shift", "system_fidelity", "orthogonal_probability"});
  if (s.orthogonal_fit) t.comment("fit", to_json(*s.orthogonal_fit));
  if (s.shift_error_fit) t.comment("shift_error_fit", to_json(*s.shift_error_fit));
  for (const auto& r : s.runs) {
    t.row({r.T, static_cast<double>(r.slices), r.pointer_shift, r.predicted_shift.value_or(std::nan("")),
           r.system_fidelity, r.orthogonal_probability});
  }
  return t;
}

CsvTable series_csv(const protect::SeriesResult& s) {
  CsvTable t({"round", "reading", "difference", "running_mean", "system_fidelity"});
  t.comment("seed", s.seed);
  t.row({0.0, s.readings.front(), std::nan(""), std::nan(""), 1.0});
  for (std::size_t i = 0; i < s.differences.size(); ++i) {
    t.row({static_cast<double>(i + 1), s.readings[i + 1], s.differences[i], s.running_mean[i], s.system_fidelity[i]});
  }
  return t;
}

CsvTable traces_csv(const std::vector<qnd::QndTrace>& traces) {
  CsvTable t({"trace", "seed", "mean", "spread", "S", "posterior_mean", "posterior_variance"});
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& tr = traces[i];
    t.row({static_cast<double>(i), static_cast<double>(tr.seed), tr.mean, tr.spread, tr.S, tr.posteriors.back().mean,
           tr.posteriors.back().variance});
  }
  return t;
}

}  // namespace protectsim::output
