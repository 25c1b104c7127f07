#pragma once

// Scenario documents ("schema": "v1"). Built-in scenarios serialize as a name
// plus parameters; "custom" carries dense matrices as {"re": [[...]], "im": [[...]]}.

#include <filesystem>

#include <json.hpp>

#include "protectsim/models.hpp"

namespace protectsim::scenario_io {

using json = nlohmann::json;

json recipe_to_json(const models::ScenarioRecipe& recipe);
// ConfigError on a missing/unknown schema, scenario name or malformed field.
models::ScenarioRecipe recipe_from_json(const json& doc);

std::string scenario_name(const models::ScenarioRecipe& recipe);

json matrix_to_json(const qcore::Matrix& m);
qcore::Matrix matrix_from_json(const json& j);
json vector_to_json(const qcore::Vector& v);
qcore::Vector vector_from_json(const json& j);

models::Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const models::Scenario& s, const std::filesystem::path& path);

}  // namespace protectsim::scenario_io
