#pragma once

#include "agentsim/envsuite/common.hpp"

namespace agentsim::envsuite {

// Four agents under one behavior collect good (yellow) food and avoid bad
// (blue) food. Eaten food respawns elsewhere; episodes last a fixed number of
// decisions.
class FoodCollectorEnv : public WorldEnvironment {
 public:
  static constexpr int kAgents = 4;
  static constexpr int kGoodFood = 12;
  static constexpr int kBadFood = 6;
  static constexpr double kGoodReward = 1.0;
  static constexpr double kBadReward = -1.0;
  static constexpr int kEpisodeDecisions = 500;
  static constexpr int kRays = 16;
  static constexpr double kArena = 20.0;
  static constexpr double kSpeed = 5.0;
  static constexpr int kDefaultVisualSize = 36;

  // visual_size > 0 switches to egocentric Visual(visual_size^2 x 3) observations.
  static EnvDefinition definition(int visual_size = 0);
  explicit FoodCollectorEnv(int visual_size = 0) : visual_size_(visual_size) {}

  std::string name() const override { return "FoodCollector"; }
  void initialize(Academy& academy) override;
  void on_episode_begin(Academy& academy, AgentId agent) override;
  void apply_action(Academy& academy, AgentId agent, std::span<const float> action) override;
  void tick(Academy& academy, double dt) override;
  void observe(const Academy& academy, AgentId agent,
               std::span<const std::span<float>> out) const override;
  std::vector<float> expert_action(const Academy& academy, AgentId agent) const override;
  bool has_expert() const override { return true; }

 private:
  Vec2 random_free_point(Rng& rng) const;
  void reset_world(Rng& rng);

  int visual_size_;
  std::vector<AgentId> agent_ids_;
  std::vector<worldsim::BodyId> agent_bodies_;
  std::vector<worldsim::BodyId> foods_;
  bool world_dirty_ = true;
  sensors::RaycastConfig rays_;
};

}  // namespace agentsim::envsuite
