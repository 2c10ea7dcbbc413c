#pragma once

#include "agentsim/envsuite/common.hpp"

namespace agentsim::envsuite {

// Square arena with a goal strip along the top edge. The agent pushes a
// block into the strip.
class PushBlockEnv : public WorldEnvironment {
 public:
  static constexpr double kTickReward = -0.0025;
  static constexpr double kGoalReward = 5.0;
  static constexpr int kMaxStep = 500;
  static constexpr int kRays = 32;
  static constexpr double kArena = 10.0;
  static constexpr double kGoalLine = 8.5;  // strip covers y in [8.5, 10]
  static constexpr double kBlockHalf = 1.0;
  static constexpr double kAgentHalf = 0.4;
  static constexpr double kSpeed = 5.0;

  static EnvDefinition definition();

  std::string name() const override { return "PushBlock"; }
  void initialize(Academy& academy) override;
  void on_episode_begin(Academy& academy, AgentId agent) override;
  void apply_action(Academy& academy, AgentId agent, std::span<const float> action) override;
  void tick(Academy& academy, double dt) override;
  void observe(const Academy& academy, AgentId agent,
               std::span<const std::span<float>> out) const override;
  std::vector<float> expert_action(const Academy& academy, AgentId agent) const override;
  bool has_expert() const override { return true; }
  std::map<std::string, double> parameter_defaults() const override;

  Vec2 agent_position() const { return world_.body(agent_body_).position; }
  Vec2 block_position() const { return world_.body(block_body_).position; }
  void place(Vec2 agent, Vec2 block);

 private:
  AgentId agent_id_ = -1;
  worldsim::BodyId agent_body_ = -1;
  worldsim::BodyId block_body_ = -1;
  worldsim::BodyId goal_body_ = -1;
  sensors::RaycastConfig rays_;
};

}  // namespace agentsim::envsuite
