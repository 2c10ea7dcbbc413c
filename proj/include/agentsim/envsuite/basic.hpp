#pragma once

#include "agentsim/envsuite/common.hpp"

namespace agentsim::envsuite {

// Linear corridor of 21 cells. Reaching cell 7 pays a small reward, cell 17
// a large one; both end the episode.
class BasicEnv : public WorldEnvironment {
 public:
  static constexpr int kCells = 21;
  static constexpr int kStart = 10;
  static constexpr int kSmallGoal = 7;
  static constexpr int kLargeGoal = 17;
  static constexpr double kStepReward = -0.01;
  static constexpr double kSmallGoalReward = 0.1;
  static constexpr double kLargeGoalReward = 1.0;
  static constexpr int kMaxStep = 100;

  static EnvDefinition definition();

  std::string name() const override { return "Basic"; }
  void initialize(Academy& academy) override;
  void on_episode_begin(Academy& academy, AgentId agent) override;
  void apply_action(Academy& academy, AgentId agent, std::span<const float> action) override;
  void tick(Academy& academy, double dt) override;
  void observe(const Academy& academy, AgentId agent,
               std::span<const std::span<float>> out) const override;
  std::vector<float> expert_action(const Academy& academy, AgentId agent) const override;
  bool has_expert() const override { return true; }

  int position() const { return position_; }

 private:
  void sync_body();

  AgentId agent_ = -1;
  int position_ = kStart;
  int action_ = 0;
  worldsim::BodyId body_ = -1;
};

}  // namespace agentsim::envsuite
