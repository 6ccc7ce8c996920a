#pragma once

#include <optional>
#include <string>
#include <vector>

#include "neurocactus/scenario.hpp"

namespace neurocactus {

// sixteen_node, macaque, macaque_lesioned, clustering
std::vector<Scenario> builtin_scenarios();
std::vector<std::string> builtin_names();
std::optional<Scenario> builtin_scenario(const std::string& name);

// The V1 <-> V3 lesion used by macaque_lesioned.
DropoutPlan v1_v3_lesion();

// Builtin name, else a scenario file path. Throws ScenarioError.
Scenario resolve_scenario(const std::string& name_or_path);

}  // namespace neurocactus
