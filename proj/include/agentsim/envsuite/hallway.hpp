#pragma once

#include "agentsim/envsuite/common.hpp"

namespace agentsim::envsuite {

// A room opening onto a corridor with a coloured goal at each end. The cue
// block in the room shows which colour is correct; it is only visible from
// inside the room or directly under the opening, so the agent has to carry
// the information down the corridor.
class HallwayEnv : public WorldEnvironment {
 public:
  static constexpr double kTickReward = -0.0003;
  static constexpr double kCorrectReward = 1.0;
  static constexpr double kWrongReward = -0.1;
  static constexpr int kMaxStep = 1000;
  static constexpr int kStack = 3;
  static constexpr int kRays = 16;
  static constexpr double kSpeed = 5.0;

  static EnvDefinition definition();

  std::string name() const override { return "Hallway"; }
  void initialize(Academy& academy) override;
  void on_episode_begin(Academy& academy, AgentId agent) override;
  void apply_action(Academy& academy, AgentId agent, std::span<const float> action) override;
  void tick(Academy& academy, double dt) override;
  void observe(const Academy& academy, AgentId agent,
               std::span<const std::span<float>> out) const override;
  std::vector<float> expert_action(const Academy& academy, AgentId agent) const override;
  bool has_expert() const override { return true; }

  // 0 = orange, 1 = red
  int cue_color() const { return cue_color_; }
  // x sign of the goal matching the cue
  double correct_side() const;
  Vec2 agent_position() const { return world_.body(agent_body_).position; }

 private:
  AgentId agent_id_ = -1;
  worldsim::BodyId agent_body_ = -1;
  worldsim::BodyId cue_body_ = -1;
  worldsim::BodyId left_goal_ = -1;
  worldsim::BodyId right_goal_ = -1;
  int cue_color_ = 0;
  int orange_on_left_ = 1;
  sensors::RaycastConfig rays_;
};

}  // namespace agentsim::envsuite
