#pragma once

#include <map>
#include <string>
#include <vector>

#include "agentsim/kernel/academy.hpp"
#include "agentsim/sensors/sensors.hpp"
#include "agentsim/worldsim/world.hpp"

namespace agentsim::envsuite {

using kernel::Academy;
using kernel::AgentId;
using worldsim::Vec2;

struct ParamDef {
  std::string name;
  double default_value = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Static description of an environment: behaviors, reward constants,
// parameters and defaults.
struct EnvDefinition {
  std::string name;
  std::vector<kernel::BehaviorSpec> behaviors;
  std::map<std::string, double> rewards;  // event -> reward
  std::vector<std::string> termination;
  std::vector<ParamDef> parameters;
  int decision_interval = kernel::kDefaultDecisionInterval;
  int max_step = 0;  // ticks; 0 = none
  int agents = 1;
};

// Reads an environment parameter, clamping to the declared range with a
// warning when it falls outside.
double read_param(const Academy& academy, const ParamDef& def);

// Shared action layout for 2D movers: 0 no-op, 1 -x, 2 +x, 3 +y, 4 -y.
inline constexpr int kMoveActions = 5;
Vec2 move_direction(int action);

// Base class for environments backed by a worldsim::World.
class WorldEnvironment : public kernel::Environment {
 public:
  const worldsim::World& world() const override { return world_; }
  const sensors::Palette& palette() const override { return palette_; }

 protected:
  // Adds four static wall slabs around `inner` with the given thickness.
  void add_walls(const worldsim::Bounds& inner, double thickness, const std::string& tag = "wall");

  worldsim::World world_;
  sensors::Palette palette_;
};

}  // namespace agentsim::envsuite
