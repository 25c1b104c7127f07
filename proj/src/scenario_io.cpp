#include "protectsim/scenario_io.hpp"

#include <fstream>

#include "protectsim/errors.hpp"

namespace protectsim::scenario_io {

using models::Vec3;

namespace {

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("scenario document: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario document: bad field '") + key + "': " + e.what());
  }
}

template <class T>
T field_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? field<T>(j, key) : fallback;
}

json to_json(const models::SpinFieldParams& p) {
  return {{"mu", p.mu}, {"b0", p.b0}, {"field_dir", p.field_dir}, {"bi", p.bi}, {"coupling_dir", p.coupling_dir}};
}

models::SpinFieldParams spin_from(const json& j) {
  models::SpinFieldParams p;
  p.mu = field_or(j, "mu", p.mu);
  p.b0 = field_or(j, "b0", p.b0);
  p.field_dir = field_or(j, "field_dir", p.field_dir);
  p.bi = field_or(j, "bi", p.bi);
  p.coupling_dir = field_or(j, "coupling_dir", p.coupling_dir);
  return p;
}

json to_json(const models::PacketParams& p) {
  return {{"width", p.width}, {"center", p.center}, {"momentum", p.momentum}, {"extent", p.extent},
          {"points", p.points}};
}

models::PacketParams packet_from(const json& j) {
  models::PacketParams p;
  p.width = field_or(j, "width", p.width);
  p.center = field_or(j, "center", p.center);
  p.momentum = field_or(j, "momentum", p.momentum);
  p.extent = field_or(j, "extent", p.extent);
  p.points = field_or(j, "points", p.points);
  return p;
}

json to_json(const models::OscillatorParams& p) {
  return {{"mass", p.mass}, {"omega", p.omega}, {"fock_dim", p.fock_dim}};
}

models::OscillatorParams osc_from(const json& j) {
  models::OscillatorParams p;
  p.mass = field_or(j, "mass", p.mass);
  p.omega = field_or(j, "omega", p.omega);
  p.fock_dim = field_or(j, "fock_dim", p.fock_dim);
  return p;
}

json factor_to_json(const qcore::HilbertFactor& f) {
  json j = {{"label", f.label}, {"dim", f.dim}, {"kind", qcore::to_string(f.kind)}};
  if (f.grid) j["grid"] = {{"extent", f.grid->extent}, {"points", f.grid->points}};
  return j;
}

qcore::HilbertFactor factor_from(const json& j) {
  qcore::HilbertFactor f;
  f.label = field<std::string>(j, "label");
  f.dim = field<std::size_t>(j, "dim");
  f.kind = qcore::basis_kind_from_string(field<std::string>(j, "kind"));
  if (j.contains("grid")) f.grid = qcore::GridSpec{field<double>(j["grid"], "extent"), field<std::size_t>(j["grid"], "points")};
  f.validate();
  return f;
}

}  // namespace

json matrix_to_json(const qcore::Matrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ri = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"re", re}, {"im", im}};
}

qcore::Matrix matrix_from_json(const json& j) {
  const auto re = field<std::vector<std::vector<double>>>(j, "re");
  const auto im = j.contains("im") ? field<std::vector<std::vector<double>>>(j, "im")
                                   : std::vector<std::vector<double>>(re.size(), std::vector<double>());
  if (im.size() != re.size()) throw ConfigError("matrix: re/im row counts differ");
  const auto rows = static_cast<Eigen::Index>(re.size());
  const auto cols = static_cast<Eigen::Index>(re.empty() ? 0 : re[0].size());
  qcore::Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& rr = re[static_cast<std::size_t>(r)];
    const auto& ri = im[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(rr.size()) != cols) throw ConfigError("matrix: ragged rows");
    if (!ri.empty() && ri.size() != rr.size()) throw ConfigError("matrix: re/im shapes differ");
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = {rr[static_cast<std::size_t>(c)], ri.empty() ? 0.0 : ri[static_cast<std::size_t>(c)]};
    }
  }
  return m;
}

json vector_to_json(const qcore::Vector& v) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return {{"re", re}, {"im", im}};
}

qcore::Vector vector_from_json(const json& j) {
  const auto re = field<std::vector<double>>(j, "re");
  const auto im = field_or<std::vector<double>>(j, "im", std::vector<double>(re.size(), 0.0));
  if (im.size() != re.size()) throw ConfigError("vector: re/im lengths differ");
  qcore::Vector v(static_cast<Eigen::Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i) v(static_cast<Eigen::Index>(i)) = {re[i], im[i]};
  return v;
}

std::string scenario_name(const models::ScenarioRecipe& recipe) {
  static const char* names[] = {"aav", "momentum-coupled", "degenerate-osc", "degenerate-spin-osc", "custom"};
  return names[recipe.index()];
}

json recipe_to_json(const models::ScenarioRecipe& recipe) {
  json doc = {{"schema", "v1"}, {"scenario", scenario_name(recipe)}};
  std::visit(
      [&](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        json& p = doc["params"];
        if constexpr (std::is_same_v<R, models::AavRecipe>) {
          p = {{"field", to_json(r.field)}, {"packet", to_json(r.packet)}};
        } else if constexpr (std::is_same_v<R, models::MomentumCoupledRecipe>) {
          p = {{"field", to_json(r.field)}, {"packet", to_json(r.packet)}, {"mass", r.mass}, {"system_up", r.system_up}};
        } else if constexpr (std::is_same_v<R, models::DegenerateOscillatorsRecipe>) {
          p = {{"apparatus", to_json(r.apparatus)}, {"system", to_json(r.system)}, {"excitation", r.excitation}};
        } else if constexpr (std::is_same_v<R, models::DegenerateSpinOscillatorRecipe>) {
          p = {{"apparatus", to_json(r.apparatus)}, {"mu_b0", r.mu_b0}, {"coupling_dir", r.coupling_dir}};
        } else {
          p = {{"factors", {factor_to_json(r.apparatus), factor_to_json(r.system)}},
               {"operators",
                {{"h_apparatus", matrix_to_json(r.h_apparatus)},
                 {"q_apparatus", matrix_to_json(r.q_apparatus)},
                 {"pointer", matrix_to_json(r.pointer)},
                 {"h_system", matrix_to_json(r.h_system)},
                 {"q_system", matrix_to_json(r.q_system)}}},
               {"initial_apparatus", vector_to_json(r.initial_apparatus)},
               {"initial_system", vector_to_json(r.initial_system)},
               {"pointer_sign", r.pointer_sign},
               {"tags", r.tags}};
          p["predicted_shift"] = r.predicted_shift ? json(*r.predicted_shift) : json(nullptr);
        }
      },
      recipe);
  return doc;
}

models::ScenarioRecipe recipe_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("scenario document must be a JSON object");
  if (field_or<std::string>(doc, "schema", "") != "v1") throw ConfigError("scenario document: schema must be \"v1\"");
  const auto name = field<std::string>(doc, "scenario");
  const json p = doc.contains("params") ? doc.at("params") : json::object();
  const json empty = json::object();
  auto sub = [&](const char* key) -> const json& { return p.contains(key) ? p.at(key) : empty; };
  if (name == "aav") return models::AavRecipe{spin_from(sub("field")), packet_from(sub("packet"))};
  if (name == "momentum-coupled") {
    return models::MomentumCoupledRecipe{spin_from(sub("field")), packet_from(sub("packet")),
                                         field_or(p, "mass", 1.0), field_or(p, "system_up", true)};
  }
  if (name == "degenerate-osc") {
    return models::DegenerateOscillatorsRecipe{osc_from(sub("apparatus")), osc_from(sub("system")),
                                               field_or<std::size_t>(p, "excitation", 1)};
  }
  if (name == "degenerate-spin-osc") {
    return models::DegenerateSpinOscillatorRecipe{osc_from(sub("apparatus")), field_or(p, "mu_b0", 0.5),
                                                  field_or<Vec3>(p, "coupling_dir", Vec3{1.0, 0.0, 0.0})};
  }
  if (name == "custom") {
    models::CustomRecipe r;
    const json& factors = sub("factors");
    if (!factors.is_array() || factors.size() != 2) throw ConfigError("custom scenario needs exactly two factors");
    r.apparatus = factor_from(factors[0]);
    r.system = factor_from(factors[1]);
    const json& ops = sub("operators");
    r.h_apparatus = matrix_from_json(field<json>(ops, "h_apparatus"));
    r.q_apparatus = matrix_from_json(field<json>(ops, "q_apparatus"));
    r.pointer = matrix_from_json(field<json>(ops, "pointer"));
    r.h_system = matrix_from_json(field<json>(ops, "h_system"));
    r.q_system = matrix_from_json(field<json>(ops, "q_system"));
    r.initial_apparatus = vector_from_json(field<json>(p, "initial_apparatus"));
    r.initial_system = vector_from_json(field<json>(p, "initial_system"));
    r.pointer_sign = field_or(p, "pointer_sign", 1.0);
    if (p.contains("predicted_shift") && !p["predicted_shift"].is_null()) {
      r.predicted_shift = field<double>(p, "predicted_shift");
    }
    r.tags = field_or<std::vector<std::string>>(p, "tags", {});
    return r;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

models::Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario file " + path.string() + " is not valid JSON: " + e.what());
  }
  return models::build(recipe_from_json(doc));
}

void save_scenario(const models::Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write scenario file " + path.string());
  out << recipe_to_json(s.recipe).dump(2) << '\n';
}

}  // namespace protectsim::scenario_io
