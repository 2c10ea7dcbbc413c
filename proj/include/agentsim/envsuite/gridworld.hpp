#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "agentsim/envsuite/common.hpp"

namespace agentsim::envsuite {

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

// N x N grid with one goal and K obstacles. Layout is resampled at every
// episode start from the grid_size / num_obstacles parameters.
class GridWorldEnv : public WorldEnvironment {
 public:
  static constexpr double kStepReward = -0.01;
  static constexpr double kGoalReward = 1.0;
  static constexpr double kObstacleReward = -1.0;
  static constexpr int kMaxStep = 100;
  static constexpr int kDefaultResolution = 36;

  static EnvDefinition definition(int resolution = kDefaultResolution);

  // config key "visual_size" selects the render resolution (36 default).
  explicit GridWorldEnv(int resolution = kDefaultResolution) : resolution_(resolution) {}

  std::string name() const override { return "GridWorld"; }
  void initialize(Academy& academy) override;
  void on_episode_begin(Academy& academy, AgentId agent) override;
  void apply_action(Academy& academy, AgentId agent, std::span<const float> action) override;
  void tick(Academy& academy, double dt) override;
  void observe(const Academy& academy, AgentId agent,
               std::span<const std::span<float>> out) const override;
  std::vector<float> expert_action(const Academy& academy, AgentId agent) const override;
  bool has_expert() const override { return true; }
  std::map<std::string, double> parameter_defaults() const override;

  int grid_size() const { return size_; }
  Cell agent_cell() const { return agent_; }
  Cell goal_cell() const { return goal_; }
  const std::vector<Cell>& obstacles() const { return obstacles_; }
  // Overrides the sampled layout (tests and scripted scenarios).
  void set_layout(int size, Cell agent, Cell goal, std::vector<Cell> obstacles);

  // Length of the shortest obstacle-free path from agent to goal, if any.
  std::optional<int> shortest_path_length() const;

 private:
  std::optional<int> first_step_toward_goal() const;
  void rebuild_world();

  int resolution_;
  AgentId agent_id_ = -1;
  int size_ = 5;
  Cell agent_;
  Cell goal_;
  std::vector<Cell> obstacles_;
  int action_ = 0;
};

}  // namespace agentsim::envsuite
