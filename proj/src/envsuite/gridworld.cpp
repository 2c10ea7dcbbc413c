#include "agentsim/envsuite/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "agentsim/core/error.hpp"

namespace agentsim::envsuite {

namespace {

const ParamDef kGridSize{"grid_size", 5.0, 3.0, 15.0};
const ParamDef kNumObstacles{"num_obstacles", 1.0, 0.0, 10.0};

constexpr int kDx[kMoveActions] = {0, -1, 1, 0, 0};
constexpr int kDy[kMoveActions] = {0, 0, 0, 1, -1};

}  // namespace

EnvDefinition GridWorldEnv::definition(int resolution) {
  EnvDefinition def;
  def.name = "GridWorld";
  def.behaviors = {{"GridWorld",
                    {kernel::ObservationSpec::visual(resolution, resolution)},
                    kernel::ActionSpec::discrete({kMoveActions})}};
  def.rewards = {{"decision", kStepReward}, {"goal", kGoalReward}, {"obstacle", kObstacleReward}};
  def.termination = {"enter goal cell", "enter obstacle cell", "max_step"};
  def.parameters = {kGridSize, kNumObstacles};
  def.decision_interval = 1;
  def.max_step = kMaxStep;
  return def;
}

std::map<std::string, double> GridWorldEnv::parameter_defaults() const {
  return {{kGridSize.name, kGridSize.default_value},
          {kNumObstacles.name, kNumObstacles.default_value}};
}

void GridWorldEnv::initialize(Academy& academy) {
  palette_.background = {0.0f, 0.0f, 0.0f};
  palette_.colors = {{"agent", {0.0f, 0.0f, 1.0f}},
                     {"goal", {0.0f, 1.0f, 0.0f}},
                     {"obstacle", {1.0f, 0.0f, 0.0f}}};
  const auto def = definition(resolution_);
  agent_id_ = academy.register_agent(def.behaviors[0], def.decision_interval, def.max_step).id;
}

void GridWorldEnv::set_layout(int size, Cell agent, Cell goal, std::vector<Cell> obstacles) {
  size_ = size;
  agent_ = agent;
  goal_ = goal;
  obstacles_ = std::move(obstacles);
  rebuild_world();
}

void GridWorldEnv::rebuild_world() {
  world_ = worldsim::World({{0.0, 0.0}, {static_cast<double>(size_), static_cast<double>(size_)}});
  auto centre = [](Cell c) { return Vec2{c.x + 0.5, c.y + 0.5}; };
  world_.add_body({.tag = "goal", .position = centre(goal_), .solid = false});
  for (const Cell& o : obstacles_) {
    world_.add_body({.tag = "obstacle", .position = centre(o), .solid = false});
  }
  world_.add_body({.tag = "agent", .position = centre(agent_), .kinematic = true, .solid = false,
                   .z_order = 1});
}

void GridWorldEnv::on_episode_begin(Academy& academy, AgentId) {
  const int n = static_cast<int>(std::lround(read_param(academy, kGridSize)));
  int k = static_cast<int>(std::lround(read_param(academy, kNumObstacles)));
  k = std::min(k, n * n - 2);
  Rng& rng = academy.env_rng();
  for (int attempt = 0;; ++attempt) {
    // Partial Fisher-Yates over all cells.
    std::vector<int> cells(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n * n; ++i) cells[static_cast<std::size_t>(i)] = i;
    const int needed = 2 + (attempt < 100 ? k : 0);
    for (int i = 0; i < needed; ++i) {
      const auto j = static_cast<std::size_t>(i) + rng.below(cells.size() - static_cast<std::size_t>(i));
      std::swap(cells[static_cast<std::size_t>(i)], cells[j]);
    }
    auto to_cell = [n](int idx) { return Cell{idx % n, idx / n}; };
    std::vector<Cell> obstacles;
    for (int i = 2; i < needed; ++i) obstacles.push_back(to_cell(cells[static_cast<std::size_t>(i)]));
    set_layout(n, to_cell(cells[0]), to_cell(cells[1]), std::move(obstacles));
    if (shortest_path_length()) break;
  }
  action_ = 0;
}

void GridWorldEnv::apply_action(Academy&, AgentId, std::span<const float> action) {
  action_ = static_cast<int>(action[0]);
}

void GridWorldEnv::tick(Academy& academy, double) {
  if (!academy.episode_active(agent_id_)) return;
  const Cell next{agent_.x + kDx[action_], agent_.y + kDy[action_]};
  if (next.x >= 0 && next.x < size_ && next.y >= 0 && next.y < size_) agent_ = next;
  world_.body(static_cast<worldsim::BodyId>(world_.bodies().size() - 1)).position = {
      agent_.x + 0.5, agent_.y + 0.5};
  academy.add_reward(agent_id_, kStepReward);
  if (agent_ == goal_) {
    academy.add_reward(agent_id_, kGoalReward);
    academy.end_episode(agent_id_, false);
  } else if (std::find(obstacles_.begin(), obstacles_.end(), agent_) != obstacles_.end()) {
    academy.add_reward(agent_id_, kObstacleReward);
    academy.end_episode(agent_id_, false);
  }
}

void GridWorldEnv::observe(const Academy&, AgentId, std::span<const std::span<float>> out) const {
  sensors::grid_render_into(world_, palette_, resolution_, resolution_, world_.bounds(), out[0]);
}

namespace {

// Breadth-first distances to `goal`, treating obstacles as blocked.
std::vector<int> distances_to(int n, Cell goal, const std::vector<Cell>& obstacles) {
  std::vector<int> dist(static_cast<std::size_t>(n * n), -1);
  auto index = [n](Cell c) { return static_cast<std::size_t>(c.y * n + c.x); };
  std::deque<Cell> frontier{goal};
  dist[index(goal)] = 0;
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    for (int a = 1; a < kMoveActions; ++a) {
      const Cell nb{c.x + kDx[a], c.y + kDy[a]};
      if (nb.x < 0 || nb.x >= n || nb.y < 0 || nb.y >= n) continue;
      if (dist[index(nb)] >= 0) continue;
      if (std::find(obstacles.begin(), obstacles.end(), nb) != obstacles.end()) continue;
      dist[index(nb)] = dist[index(c)] + 1;
      frontier.push_back(nb);
    }
  }
  return dist;
}

}  // namespace

std::optional<int> GridWorldEnv::shortest_path_length() const {
  const auto dist = distances_to(size_, goal_, obstacles_);
  const int d = dist[static_cast<std::size_t>(agent_.y * size_ + agent_.x)];
  if (d < 0) return std::nullopt;
  return d;
}

std::optional<int> GridWorldEnv::first_step_toward_goal() const {
  const auto dist = distances_to(size_, goal_, obstacles_);
  const int here = dist[static_cast<std::size_t>(agent_.y * size_ + agent_.x)];
  if (here <= 0) return std::nullopt;
  for (int a = 1; a < kMoveActions; ++a) {
    const Cell nb{agent_.x + kDx[a], agent_.y + kDy[a]};
    if (nb.x < 0 || nb.x >= size_ || nb.y < 0 || nb.y >= size_) continue;
    const int d = dist[static_cast<std::size_t>(nb.y * size_ + nb.x)];
    if (d >= 0 && d == here - 1) return a;
  }
  return std::nullopt;
}

std::vector<float> GridWorldEnv::expert_action(const Academy&, AgentId) const {
  return {static_cast<float>(first_step_toward_goal().value_or(0))};
}

}  // namespace agentsim::envsuite
