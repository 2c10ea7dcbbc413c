#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "agentsim/envsuite/common.hpp"

namespace agentsim::envsuite {

using EnvConfig = std::map<std::string, double>;

// Registry names, in a fixed order: Basic, GridWorld, Hallway, PushBlock,
// FoodCollector, Tennis, StrikersVsGoalie.
const std::vector<std::string>& environment_names();

EnvDefinition definition(const std::string& name);

// Builds an academy around the named environment. `params` are stored as
// environment parameters (read at episode reset); a few keys such as
// "visual_obs" also shape the observation spec at construction.
std::unique_ptr<Academy> make_env(const std::string& name, const EnvConfig& params = {},
                                  std::uint64_t seed = 0);

using ScriptedPolicy = std::function<std::vector<float>(const Academy&, AgentId)>;

// Deterministic privileged controller for demos and baselines.
ScriptedPolicy scripted_policy(const std::string& name);

}  // namespace agentsim::envsuite
