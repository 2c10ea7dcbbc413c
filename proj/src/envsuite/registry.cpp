#include "agentsim/envsuite/registry.hpp"

#include <cmath>

#include "agentsim/core/error.hpp"
#include "agentsim/envsuite/basic.hpp"
#include "agentsim/envsuite/food_collector.hpp"
#include "agentsim/envsuite/gridworld.hpp"
#include "agentsim/envsuite/hallway.hpp"
#include "agentsim/envsuite/pushblock.hpp"
#include "agentsim/envsuite/strikers_vs_goalie.hpp"
#include "agentsim/envsuite/tennis.hpp"

namespace agentsim::envsuite {

namespace {

int config_int(const EnvConfig& config, const std::string& key, int fallback) {
  auto it = config.find(key);
  if (it == config.end()) return fallback;
  return static_cast<int>(std::lround(it->second));
}

std::unique_ptr<kernel::Environment> construct(const std::string& name, const EnvConfig& config) {
  if (name == "Basic") return std::make_unique<BasicEnv>();
  if (name == "GridWorld") {
    return std::make_unique<GridWorldEnv>(
        config_int(config, "visual_size", GridWorldEnv::kDefaultResolution));
  }
  if (name == "Hallway") return std::make_unique<HallwayEnv>();
  if (name == "PushBlock") return std::make_unique<PushBlockEnv>();
  if (name == "FoodCollector") {
    int visual = 0;
    if (config_int(config, "visual_obs", 0) != 0) {
      visual = config_int(config, "visual_size", FoodCollectorEnv::kDefaultVisualSize);
    }
    return std::make_unique<FoodCollectorEnv>(visual);
  }
  if (name == "Tennis") return std::make_unique<TennisEnv>();
  if (name == "StrikersVsGoalie") return std::make_unique<StrikersVsGoalieEnv>();
  throw Error(ErrorCode::kUnknownEnvironment, "'" + name + "' is not a registered environment");
}

}  // namespace

const std::vector<std::string>& environment_names() {
  static const std::vector<std::string> names = {
      "Basic", "GridWorld", "Hallway", "PushBlock", "FoodCollector", "Tennis", "StrikersVsGoalie"};
  return names;
}

EnvDefinition definition(const std::string& name) {
  if (name == "Basic") return BasicEnv::definition();
  if (name == "GridWorld") return GridWorldEnv::definition();
  if (name == "Hallway") return HallwayEnv::definition();
  if (name == "PushBlock") return PushBlockEnv::definition();
  if (name == "FoodCollector") return FoodCollectorEnv::definition();
  if (name == "Tennis") return TennisEnv::definition();
  if (name == "StrikersVsGoalie") return StrikersVsGoalieEnv::definition();
  throw Error(ErrorCode::kUnknownEnvironment, "'" + name + "' is not a registered environment");
}

std::unique_ptr<Academy> make_env(const std::string& name, const EnvConfig& params,
                                  std::uint64_t seed) {
  auto academy = std::make_unique<Academy>(construct(name, params), seed);
  for (const auto& [key, value] : params) academy->set_environment_parameter(key, value);
  return academy;
}

ScriptedPolicy scripted_policy(const std::string& name) {
  const auto probe = construct(name, {});
  if (!probe->has_expert()) {
    throw Error(ErrorCode::kNoScriptedExpert, name + " is trained by self-play only");
  }
  return [](const Academy& academy, AgentId agent) {
    return academy.environment().expert_action(academy, agent);
  };
}

}  // namespace agentsim::envsuite
