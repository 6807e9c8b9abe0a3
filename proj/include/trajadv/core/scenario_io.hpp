#pragma once

#include <filesystem>
#include <string>

#include "trajadv/core/types.hpp"

namespace trajadv::core {

// Canonical scenario document:
//   { "dt", "history_len", "future_len", "adversary_id",
//     "agents": [ { "id", "class", "states": [[x, y], ...] } ],
//     "lanes":  [ { "centerline": [[x, y], ...], "width" } ] }
// Coordinates in meters, state rows in time order (t_index = row index).
// save_scenario emits a canonical form whose load/save round trip is
// byte-identical.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text);

std::string serialize_scenario(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

// CSV trajectory import: columns agent_id,t_index,x,y with a sidecar JSON
// carrying dt, horizons, adversary id, per-agent classes, and lanes.
Scenario load_scenario_csv(const std::filesystem::path& csv_path,
                           const std::filesystem::path& sidecar_path);

}  // namespace trajadv::core
