#pragma once

// Command-line front end. Subcommands: run, scan, series, spreading, qnd,
// qnd-ensemble. Exit codes: 0 ok, 2 config, 3 physics validation, 4 numeric.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace protectsim::cli {

using json = nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPhysics = 3;
inline constexpr int kExitNumeric = 4;

// Fully resolved run configuration. Its JSON form is embedded in every output
// and can be replayed with --config.
struct RunConfig {
  std::string command;
  json scenario;  // scenario document, "schema": "v1"
  std::string profile = "rectangular";
  double ramp_fraction = 0.1;
  std::string ramp_shape = "sine_squared";
  std::vector<double> Ts;
  std::size_t slices = 0;  // 0: derive from slices_per_time
  double slices_per_time = 20.0;
  std::size_t record_stride = 0;
  std::uint64_t seed = 0;
  std::string format = "json";
  // series
  std::size_t shots = 100;
  std::size_t bin_cells = 4;
  bool recenter = true;
  // qnd
  double n0 = 0.0, var0 = 1.0, var_m = 1.0;
  std::size_t k = 10;
  std::size_t traces = 10000;
  double alpha = 0.01;
  // qnd-ensemble
  double c = 1.0, x_perp = 0.0, n_p = 1.0;
};

json config_to_json(const RunConfig& c);
// ConfigError on missing or malformed fields.
RunConfig config_from_json(const json& j);

// Runs a resolved config and returns the rendered output (JSON or CSV text).
std::string execute(const RunConfig& c, bool timestamp = false);

// Full CLI: parses argv, executes, writes to --out (or `out`), and reports
// errors as JSON on `err`. Returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
// Same, with the arguments after the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace protectsim::cli
