#include "protectsim/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "protectsim/errors.hpp"
#include "protectsim/output.hpp"
#include "protectsim/protect.hpp"
#include "protectsim/qnd.hpp"
#include "protectsim/scenario_io.hpp"

namespace protectsim::cli {

namespace {

const std::vector<std::string> kScenarios = {"aav", "momentum-coupled", "degenerate-osc", "degenerate-spin-osc",
                                             "custom"};
const std::vector<std::string> kCommands = {"run", "scan", "series", "spreading", "qnd", "qnd-ensemble"};

bool uses_scenario(const std::string& cmd) {
  return cmd == "run" || cmd == "scan" || cmd == "series" || cmd == "spreading";
}

template <class T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("config: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad field '") + key + "': " + e.what());
  }
}

std::vector<double> parse_t_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw ConfigError("--T: empty entry in '" + text + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !std::isfinite(v)) throw ConfigError("--T: '" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--T: no values given");
  return out;
}

evolve::CouplingProfile make_profile(const RunConfig& c, double T) {
  const evolve::ProfileKind kind = evolve::profile_kind_from_string(c.profile);
  if (kind == evolve::ProfileKind::rectangular) return evolve::CouplingProfile::rectangular(T);
  return evolve::CouplingProfile::smooth_ramp(T, c.ramp_fraction, evolve::ramp_shape_from_string(c.ramp_shape));
}

std::size_t slices_for(const RunConfig& c, double T) {
  if (c.slices > 0) return c.slices;
  if (!(c.slices_per_time > 0.0)) throw ConfigError("--slices-per-time must be > 0");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(c.slices_per_time * T)));
}

double single_T(const RunConfig& c) {
  if (c.Ts.size() != 1) throw ConfigError(c.command + " needs exactly one --T value");
  if (!(c.Ts[0] > 0.0)) throw ConfigError("--T must be > 0");
  return c.Ts[0];
}

void validate_config(const RunConfig& c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
    throw ConfigError("unknown command '" + c.command + "'");
  }
  if (c.format != "json" && c.format != "csv") throw ConfigError("--format must be json or csv");
  if (uses_scenario(c.command)) {
    (void)scenario_io::recipe_from_json(c.scenario);
    (void)evolve::profile_kind_from_string(c.profile);
    (void)evolve::ramp_shape_from_string(c.ramp_shape);
    if (c.Ts.empty()) throw ConfigError("--T is required");
  }
  if (c.command == "run" || c.command == "series") (void)single_T(c);
  if (c.command == "scan" && c.Ts.size() < 4) {
    throw ConfigError("need ≥ 4 T values (got " + std::to_string(c.Ts.size()) + ")");
  }
  if (c.command == "series" && c.shots < 1) throw ConfigError("--shots must be >= 1");
  if (c.command == "qnd") {
    if (c.k < 2) throw ConfigError("--k must be >= 2");
    if (c.traces < 100) throw ConfigError("--traces must be >= 100");
  }
  if (c.command == "qnd-ensemble" && c.Ts.size() != 1) throw ConfigError("qnd-ensemble needs exactly one --T value");
}

std::string render(const std::string& command, const RunConfig& c, json result, const std::optional<std::string>& ts) {
  json doc = output::document(command, config_to_json(c), std::move(result));
  if (ts) doc["timestamp"] = *ts;
  return doc.dump(2) + "\n";
}

std::string render_csv(output::CsvTable table, const RunConfig& c, const std::optional<std::string>& ts,
                       const std::optional<json>& summary = std::nullopt) {
  table.comment("schema", "v1");
  table.comment("config", config_to_json(c));
  if (summary) table.comment("summary", *summary);
  if (ts) table.comment("timestamp", *ts);
  return table.str();
}

std::string now_iso() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

json config_to_json(const RunConfig& c) {
  json j = {{"command", c.command}, {"format", c.format}};
  if (uses_scenario(c.command)) {
    j["scenario"] = c.scenario;
    j["profile"] = {{"kind", c.profile}, {"ramp_fraction", c.ramp_fraction}, {"shape", c.ramp_shape}};
    j["T"] = c.Ts;
    j["slices"] = c.slices;
    j["slices_per_time"] = c.slices_per_time;
  }
  if (c.command == "run") j["record_stride"] = c.record_stride;
  if (c.command == "series") {
    j["seed"] = c.seed;
    j["shots"] = c.shots;
    j["bin_cells"] = c.bin_cells;
    j["recenter"] = c.recenter;
  }
  if (c.command == "qnd") {
    j["seed"] = c.seed;
    j["qnd"] = {{"n0", c.n0}, {"var0", c.var0}, {"var_m", c.var_m}, {"k", c.k}, {"traces", c.traces},
                {"alpha", c.alpha}};
  }
  if (c.command == "qnd-ensemble") {
    j["T"] = c.Ts;
    j["ensemble"] = {{"c", c.c}, {"X_perp", c.x_perp}, {"N_p", c.n_p}};
  }
  return j;
}

RunConfig config_from_json(const json& j_in) {
  if (!j_in.is_object()) throw ConfigError("config must be a JSON object");
  // Accept either a bare config or a full output document.
  const json& j = j_in.contains("config") ? j_in.at("config") : j_in;
  RunConfig c;
  c.command = get<std::string>(j, "command");
  c.format = get<std::string>(j, "format");
  if (uses_scenario(c.command)) {
    c.scenario = get<json>(j, "scenario");
    const json p = get<json>(j, "profile");
    c.profile = get<std::string>(p, "kind");
    c.ramp_fraction = get<double>(p, "ramp_fraction");
    c.ramp_shape = get<std::string>(p, "shape");
    c.Ts = get<std::vector<double>>(j, "T");
    c.slices = get<std::size_t>(j, "slices");
    c.slices_per_time = get<double>(j, "slices_per_time");
  }
  if (c.command == "run") c.record_stride = get<std::size_t>(j, "record_stride");
  if (c.command == "series") {
    c.seed = get<std::uint64_t>(j, "seed");
    c.shots = get<std::size_t>(j, "shots");
    c.bin_cells = get<std::size_t>(j, "bin_cells");
    c.recenter = get<bool>(j, "recenter");
  }
  if (c.command == "qnd") {
    c.seed = get<std::uint64_t>(j, "seed");
    const json q = get<json>(j, "qnd");
    c.n0 = get<double>(q, "n0");
    c.var0 = get<double>(q, "var0");
    c.var_m = get<double>(q, "var_m");
    c.k = get<std::size_t>(q, "k");
    c.traces = get<std::size_t>(q, "traces");
    c.alpha = get<double>(q, "alpha");
  }
  if (c.command == "qnd-ensemble") {
    c.Ts = get<std::vector<double>>(j, "T");
    const json e = get<json>(j, "ensemble");
    c.c = get<double>(e, "c");
    c.x_perp = get<double>(e, "X_perp");
    c.n_p = get<double>(e, "N_p");
  }
  validate_config(c);
  return c;
}

std::string execute(const RunConfig& c, bool timestamp) {
  validate_config(c);
  const std::optional<std::string> ts = timestamp ? std::optional<std::string>(now_iso()) : std::nullopt;
  const bool csv = c.format == "csv";

  if (c.command == "qnd-ensemble") {
    const qnd::EnsembleComparison e = qnd::ensemble_comparison(c.c, c.Ts[0], c.x_perp, c.n_p);
    if (csv) {
      output::CsvTable t({"c", "T", "X_perp", "N_p", "eps_p", "N_c"});
      t.row({e.c, e.T, e.x_perp, e.n_p, e.eps_p, e.n_c});
      return render_csv(std::move(t), c, ts);
    }
    return render(c.command, c, output::to_json(e), ts);
  }
  if (c.command == "qnd") {
    const qnd::QndParams p{c.n0, c.var0, c.var_m, c.k};
    const auto traces = qnd::simulate_traces(p, c.traces, c.seed);
    const qnd::EstimatorSummary s = qnd::estimator_stats(traces, c.alpha);
    if (csv) return render_csv(output::traces_csv(traces), c, ts, output::to_json(s));
    return render(c.command, c, output::to_json(s), ts);
  }

  const models::Scenario s = models::build(scenario_io::recipe_from_json(c.scenario));
  if (c.command == "run") {
    const double T = single_T(c);
    const evolve::CouplingProfile profile = make_profile(c, T);
    const evolve::EvolutionSettings settings{slices_for(c, T), c.record_stride};
    const evolve::BlockPropagator prop(s);
    const protect::ProtectiveRunResult r = protect::run_protective(prop, s, profile, settings);
    if (csv) {
      const evolve::Trajectory traj = evolve::propagate(prop, s, profile, settings);
      return render_csv(output::trajectory_csv(protect::trajectory_rows(s, traj)), c, ts, output::to_json(r));
    }
    return render(c.command, c, output::to_json(r), ts);
  }
  if (c.command == "scan") {
    protect::ScanSettings ss;
    ss.kind = evolve::profile_kind_from_string(c.profile);
    ss.ramp_fraction = c.ramp_fraction;
    ss.shape = evolve::ramp_shape_from_string(c.ramp_shape);
    ss.slices_per_time = c.slices_per_time;
    ss.min_slices = c.slices > 0 ? c.slices : 1;
    const protect::ScanResult r = protect::scan_T(s, c.Ts, ss);
    if (csv) return render_csv(output::scan_csv(r), c, ts);
    return render(c.command, c, output::to_json(r), ts);
  }
  if (c.command == "series") {
    const double T = single_T(c);
    const protect::SeriesResult r = protect::repeated_measurement_series(
        s, make_profile(c, T), {slices_for(c, T), 0}, {c.shots, c.seed, c.bin_cells, c.recenter});
    if (csv) return render_csv(output::series_csv(r), c, ts);
    return render(c.command, c, output::to_json(r), ts);
  }
  // spreading
  json rows = json::array();
  output::CsvTable table({"T", "measured_width2", "predicted_width2", "relative_error"});
  for (double T : c.Ts) {
    const protect::SpreadingReport r = protect::spreading_report(s, T);
    rows.push_back(output::to_json(r));
    table.row({r.T, r.measured_width2, r.predicted_width2, r.relative_error});
  }
  if (csv) return render_csv(std::move(table), c, ts);
  return render(c.command, c, rows, ts);
}

// --- argv parsing -------------------------------------------------------------

namespace {

struct Flags {
  std::string scenario = "aav";
  std::string scenario_file;
  std::map<std::string, double> reals;
  std::map<std::string, CLI::Option*> real_opts;
  CLI::Option* points = nullptr;
  CLI::Option* fock_dim = nullptr;
  std::size_t points_v = 256, fock_dim_v = 24;
  bool spin_down = false;
  std::string T;
  std::string config_file;
  std::string out;
  bool timestamp = false;
  CLI::Option* slices_opt = nullptr;

  bool given(const std::string& key) const { return real_opts.at(key)->count() > 0; }
  double value(const std::string& key, double fallback) const { return given(key) ? reals.at(key) : fallback; }
};

void add_real(CLI::App* app, Flags& f, const std::string& flag, const std::string& key, const std::string& help) {
  f.reals[key] = 0.0;
  f.real_opts[key] = app->add_option(flag, f.reals[key], help);
}

json resolve_scenario(const Flags& f) {
  if (!f.scenario_file.empty()) {
    std::ifstream in(f.scenario_file);
    if (!in) throw ConfigError("cannot open scenario file " + f.scenario_file);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("scenario file is not valid JSON: " + std::string(e.what()));
    }
    (void)scenario_io::recipe_from_json(doc);
    return doc;
  }
  if (f.scenario == "custom") throw ConfigError("--scenario custom needs --scenario-file");

  std::optional<models::Vec3> n;
  if (f.given("nx") || f.given("ny") || f.given("nz")) {
    models::Vec3 v{f.value("nx", 0.0), f.value("ny", 0.0), f.value("nz", 0.0)};
    const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(len > 0.0)) throw ConfigError("--nx/--ny/--nz must not all be zero");
    for (double& x : v) x /= len;
    n = v;
  }
  auto spin = [&](double theta_default) {
    models::SpinFieldParams p = models::SpinFieldParams::with_angle(
        f.value("mu", 1.0), f.value("B0", 1.0), f.value("Bi", 0.1), f.value("theta", theta_default));
    if (n) p.coupling_dir = *n;
    return p;
  };
  auto packet = [&](double eps_default, double extent_per_eps) {
    models::PacketParams p;
    p.width = f.value("eps", eps_default);
    p.center = f.value("x0", 0.0);
    p.momentum = f.value("p0", 0.0);
    p.extent = f.value("L", extent_per_eps * p.width);
    p.points = f.points_v;
    return p;
  };
  auto osc = [&](const char* mass_key) {
    models::OscillatorParams p;
    p.mass = f.value(mass_key, 1.0);
    p.omega = f.value("omega", 1.0);
    p.fock_dim = f.fock_dim_v;
    return p;
  };
  models::ScenarioRecipe recipe;
  if (f.scenario == "aav") {
    recipe = models::AavRecipe{spin(std::numbers::pi / 3.0), packet(50.0, 16.0)};
  } else if (f.scenario == "momentum-coupled") {
    recipe = models::MomentumCoupledRecipe{spin(0.0), packet(1.0, 40.0), f.value("M", 1.0), !f.spin_down};
  } else if (f.scenario == "degenerate-osc") {
    recipe = models::DegenerateOscillatorsRecipe{osc("M"), osc("m"), 1};
  } else if (f.scenario == "degenerate-spin-osc") {
    const models::OscillatorParams a = osc("M");
    recipe = models::DegenerateSpinOscillatorRecipe{a, f.value("muB0", 0.5 * a.omega), n.value_or(models::Vec3{1, 0, 0})};
  } else {
    throw ConfigError("unknown scenario '" + f.scenario + "'");
  }
  // Build once so parameter errors surface before any output is produced.
  (void)models::build(recipe);
  return scenario_io::recipe_to_json(recipe);
}

void add_scenario_flags(CLI::App* app, Flags& f) {
  app->add_option("--scenario", f.scenario, "Scenario name")->check(CLI::IsMember(kScenarios));
  app->add_option("--scenario-file", f.scenario_file, "Scenario JSON document");
  add_real(app, f, "--mu", "mu", "Magnetic moment");
  add_real(app, f, "--B0", "B0", "Static field magnitude");
  add_real(app, f, "--Bi", "Bi", "Coupling field magnitude");
  add_real(app, f, "--theta", "theta", "Angle between coupling and static field");
  add_real(app, f, "--nx", "nx", "Coupling direction x");
  add_real(app, f, "--ny", "ny", "Coupling direction y");
  add_real(app, f, "--nz", "nz", "Coupling direction z");
  add_real(app, f, "--eps", "eps", "Packet width");
  add_real(app, f, "--L", "L", "Grid extent");
  add_real(app, f, "--x0", "x0", "Packet centre");
  add_real(app, f, "--p0", "p0", "Packet momentum");
  add_real(app, f, "--M", "M", "Apparatus mass");
  add_real(app, f, "--m", "m", "System oscillator mass");
  add_real(app, f, "--omega", "omega", "Oscillator frequency");
  add_real(app, f, "--muB0", "muB0", "Spin splitting for degenerate-spin-osc");
  f.points = app->add_option("--points", f.points_v, "Grid points (power of two)");
  f.fock_dim = app->add_option("--fock-dim", f.fock_dim_v, "Fock truncation");
  app->add_flag("--spin-down", f.spin_down, "Momentum-coupled system starts in the -1 eigenstate");
}

void add_common_flags(CLI::App* app, Flags& f, RunConfig& c) {
  app->add_option("--config", f.config_file, "Replay the config embedded in a previous output");
  app->add_option("--out", f.out, "Output path (default stdout)");
  app->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app->add_flag("--timestamp", f.timestamp, "Add a wall-clock timestamp to the output");
}

void add_profile_flags(CLI::App* app, Flags& f, RunConfig& c) {
  app->add_option("--T", f.T, "Duration, or comma-separated list for scan");
  app->add_option("--profile", c.profile, "rectangular or smooth_ramp")
      ->check(CLI::IsMember({"rectangular", "rect", "smooth_ramp", "ramp"}));
  app->add_option("--ramp-fraction", c.ramp_fraction, "Ramp fraction per end, in [0, 0.5)");
  app->add_option("--ramp-shape", c.ramp_shape, "sine_squared or linear")
      ->check(CLI::IsMember({"sine_squared", "sine2", "linear"}));
  f.slices_opt = app->add_option("--slices", c.slices, "Slice count N (overrides --slices-per-time)");
  app->add_option("--slices-per-time", c.slices_per_time, "Slices per unit time");
}

std::string error_json(const std::string& kind, int code, const std::string& message) {
  return json{{"error", {{"kind", kind}, {"exit_code", code}, {"message", message}}}}.dump() + "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Protective measurement simulator"};
  app.require_subcommand(1);
  RunConfig c;
  // One flag set per subcommand so option counts are not shared.
  std::map<std::string, Flags> flags;

  std::map<std::string, CLI::App*> subs;
  for (const std::string& name : kCommands) {
    CLI::App* sub = app.add_subcommand(name);
    subs[name] = sub;
    add_common_flags(sub, flags[name], c);
  }
  for (const char* name : {"run", "scan", "series", "spreading"}) {
    add_scenario_flags(subs[name], flags[name]);
    add_profile_flags(subs[name], flags[name], c);
  }
  subs["run"]->add_option("--record-stride", c.record_stride, "Snapshot every k slices (csv trajectory)");
  for (const char* name : {"series", "qnd"}) subs[name]->add_option("--seed", c.seed, "RNG seed");
  subs["series"]->add_option("--shots", c.shots, "Measurement rounds");
  subs["series"]->add_option("--bin-cells", c.bin_cells, "Pointer grid cells per readout bin");
  subs["series"]->add_option("--recenter", c.recenter, "Translate the pointer back after each reading");
  CLI::App* q = subs["qnd"];
  q->add_option("--n0", c.n0, "Prior mean");
  q->add_option("--var0", c.var0, "Prior variance");
  q->add_option("--varm", c.var_m, "Reading noise variance");
  q->add_option("--k", c.k, "Readings per trace");
  q->add_option("--traces", c.traces, "Trace count");
  q->add_option("--alpha", c.alpha, "KS significance");
  CLI::App* e = subs["qnd-ensemble"];
  e->add_option("--c", c.c, "First-order coefficient");
  e->add_option("--T", flags["qnd-ensemble"].T, "Duration");
  e->add_option("--Xperp", c.x_perp, "Orthogonal-state pointer expectation");
  e->add_option("--Np", c.n_p, "Protective ensemble size");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& pe) {
      throw ConfigError(pe.what());
    }
    const std::string command = app.get_subcommands().front()->get_name();
    const Flags& f = flags.at(command);

    RunConfig resolved;
    if (!f.config_file.empty()) {
      std::ifstream in(f.config_file);
      if (!in) throw ConfigError("cannot open config file " + f.config_file);
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& pe) {
        throw ConfigError("config file is not valid JSON: " + std::string(pe.what()));
      }
      resolved = config_from_json(doc);
      if (resolved.command != command) {
        throw ConfigError("config file is for '" + resolved.command + "', not '" + command + "'");
      }
    } else {
      resolved = c;
      resolved.command = command;
      if (!f.T.empty()) resolved.Ts = parse_t_list(f.T);
      if (uses_scenario(command)) resolved.scenario = resolve_scenario(f);
      validate_config(resolved);
    }

    const std::string text = execute(resolved, f.timestamp);
    if (f.out.empty()) {
      out << text;
    } else {
      const std::filesystem::path path(f.out);
      const std::filesystem::path tmp = path.string() + ".tmp";
      {
        std::ofstream o(tmp, std::ios::binary);
        if (!o) throw ConfigError("cannot write " + f.out);
        o << text;
        if (!o) throw ConfigError("failed writing " + f.out);
      }
      std::filesystem::rename(tmp, path);
    }
    return kExitOk;
  } catch (const Error& ex) {
    err << error_json(ex.kind(), ex.exit_code(), ex.what());
    return ex.exit_code();
  } catch (const std::exception& ex) {
    err << error_json("numeric", kExitNumeric, ex.what());
    return kExitNumeric;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"protectsim"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace protectsim::cli
