#pragma once

#include "agentsim/envsuite/common.hpp"

namespace agentsim::envsuite {

// Asymmetric top-down soccer: two Strikers try to put the ball in the goal
// on the left edge, one Goalie defends it.
class StrikersVsGoalieEnv : public WorldEnvironment {
 public:
  static constexpr double kGoalReward = 1.0;
  static constexpr double kStrikerTick = -0.001;
  static constexpr double kGoalieTick = 0.001;
  static constexpr int kMaxStep = 1000;
  static constexpr int kRays = 16;
  static constexpr double kFieldX = 16.0;
  static constexpr double kFieldY = 10.0;
  static constexpr double kMouthLo = 3.5;
  static constexpr double kMouthHi = 6.5;
  static constexpr double kSpeed = 5.0;
  static constexpr double kKickSpeed = 6.0;

  static EnvDefinition definition();

  std::string name() const override { return "StrikersVsGoalie"; }
  void initialize(Academy& academy) override;
  void on_episode_begin(Academy& academy, AgentId agent) override;
  void apply_action(Academy& academy, AgentId agent, std::span<const float> action) override;
  void tick(Academy& academy, double dt) override;
  void observe(const Academy& academy, AgentId agent,
               std::span<const std::span<float>> out) const override;

  Vec2 ball_position() const { return world_.body(ball_).position; }
  void set_ball(Vec2 position, Vec2 velocity);
  Vec2 agent_position(AgentId agent) const;

 private:
  std::size_t index_of(AgentId agent) const;

  std::vector<AgentId> agents_;  // strikers then goalie
  std::vector<worldsim::BodyId> bodies_;
  worldsim::BodyId ball_ = -1;
  bool world_dirty_ = true;
  sensors::RaycastConfig rays_;
};

}  // namespace agentsim::envsuite
