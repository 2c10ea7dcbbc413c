#include "agentsim/envsuite/basic.hpp"

namespace agentsim::envsuite {

EnvDefinition BasicEnv::definition() {
  EnvDefinition def;
  def.name = "Basic";
  def.behaviors = {{"Basic", {kernel::ObservationSpec::vector(1)}, kernel::ActionSpec::discrete({3})}};
  def.rewards = {{"decision", kStepReward},
                 {"small_goal", kSmallGoalReward},
                 {"large_goal", kLargeGoalReward}};
  def.termination = {"reach cell 7", "reach cell 17", "max_step"};
  def.decision_interval = 1;
  def.max_step = kMaxStep;
  return def;
}

void BasicEnv::initialize(Academy& academy) {
  world_ = worldsim::World({{0.0, 0.0}, {static_cast<double>(kCells), 1.0}});
  palette_.background = {0.9f, 0.9f, 0.9f};
  palette_.colors = {{"agent", {0.1f, 0.3f, 0.9f}},
                     {"small_goal", {0.6f, 0.9f, 0.6f}},
                     {"large_goal", {0.1f, 0.7f, 0.1f}}};
  auto cell = [](int i) { return Vec2{i + 0.5, 0.5}; };
  world_.add_body({.tag = "small_goal", .position = cell(kSmallGoal), .solid = false});
  world_.add_body({.tag = "large_goal", .position = cell(kLargeGoal), .solid = false});
  body_ = world_.add_body({.tag = "agent", .position = cell(kStart), .kinematic = true,
                           .solid = false, .z_order = 1});
  const auto def = definition();
  agent_ = academy.register_agent(def.behaviors[0], def.decision_interval, def.max_step).id;
}

void BasicEnv::sync_body() { world_.body(body_).position = {position_ + 0.5, 0.5}; }

void BasicEnv::on_episode_begin(Academy&, AgentId) {
  position_ = kStart;
  action_ = 0;
  sync_body();
}

void BasicEnv::apply_action(Academy&, AgentId, std::span<const float> action) {
  action_ = static_cast<int>(action[0]);
}

void BasicEnv::tick(Academy& academy, double) {
  if (!academy.episode_active(agent_)) return;
  if (action_ == 1) position_ = std::max(0, position_ - 1);
  if (action_ == 2) position_ = std::min(kCells - 1, position_ + 1);
  sync_body();
  academy.add_reward(agent_, kStepReward);
  if (position_ == kSmallGoal) {
    academy.add_reward(agent_, kSmallGoalReward);
    academy.end_episode(agent_, false);
  } else if (position_ == kLargeGoal) {
    academy.add_reward(agent_, kLargeGoalReward);
    academy.end_episode(agent_, false);
  }
}

void BasicEnv::observe(const Academy&, AgentId, std::span<const std::span<float>> out) const {
  out[0][0] = static_cast<float>(position_) / static_cast<float>(kCells - 1);
}

std::vector<float> BasicEnv::expert_action(const Academy&, AgentId) const { return {2.0f}; }

}  // namespace agentsim::envsuite
