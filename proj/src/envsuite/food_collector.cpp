#include "agentsim/envsuite/food_collector.hpp"

#include <cmath>
#include <limits>

namespace agentsim::envsuite {

namespace {

const std::vector<std::string> kTags = {"food_good", "food_bad", "agent", "wall"};
constexpr double kRayLength = 15.0;
constexpr double kAgentHalf = 0.5;
constexpr double kFoodRadius = 0.4;
constexpr double kViewHalf = 5.0;

}  // namespace

EnvDefinition FoodCollectorEnv::definition(int visual_size) {
  EnvDefinition def;
  def.name = "FoodCollector";
  const auto obs = visual_size > 0
                       ? kernel::ObservationSpec::visual(visual_size, visual_size)
                       : kernel::ObservationSpec::raycast(kRays, static_cast<int>(kTags.size()));
  def.behaviors = {{"FoodCollector", {obs}, kernel::ActionSpec::discrete({kMoveActions})}};
  def.rewards = {{"good_food", kGoodReward}, {"bad_food", kBadReward}};
  def.termination = {"fixed episode length"};
  def.decision_interval = kernel::kDefaultDecisionInterval;
  def.max_step = kEpisodeDecisions * kernel::kDefaultDecisionInterval;
  def.agents = kAgents;
  return def;
}

void FoodCollectorEnv::initialize(Academy& academy) {
  world_ = worldsim::World({{0.0, 0.0}, {kArena, kArena}}, kSpeed);
  palette_.background = {0.15f, 0.15f, 0.15f};
  palette_.colors = {{"wall", {0.5f, 0.5f, 0.5f}},
                     {"food_good", {1.0f, 0.9f, 0.1f}},
                     {"food_bad", {0.1f, 0.4f, 1.0f}},
                     {"agent", {0.9f, 0.9f, 0.9f}}};
  add_walls(world_.bounds(), 1.0);
  for (int i = 0; i < kGoodFood + kBadFood; ++i) {
    foods_.push_back(world_.add_body({.tag = i < kGoodFood ? "food_good" : "food_bad",
                                      .shape = worldsim::Circle{kFoodRadius},
                                      .position = {1.0, 1.0},
                                      .solid = false}));
  }
  const auto def = definition(visual_size_);
  for (int i = 0; i < kAgents; ++i) {
    agent_bodies_.push_back(world_.add_body({.tag = "agent",
                                             .shape = worldsim::Aabb{{kAgentHalf, kAgentHalf}},
                                             .position = {1.0, 1.0},
                                             .kinematic = true,
                                             .z_order = 1}));
    agent_ids_.push_back(
        academy.register_agent(def.behaviors[0], def.decision_interval, def.max_step).id);
  }
  rays_ = sensors::RaycastConfig::ring(kRays, kRayLength, kTags);
}

Vec2 FoodCollectorEnv::random_free_point(Rng& rng) const {
  return {rng.uniform(1.0, kArena - 1.0), rng.uniform(1.0, kArena - 1.0)};
}

void FoodCollectorEnv::reset_world(Rng& rng) {
  for (auto id : foods_) world_.body(id).position = random_free_point(rng);
}

void FoodCollectorEnv::on_episode_begin(Academy& academy, AgentId agent) {
  Rng& rng = academy.env_rng();
  // Episodes end together (fixed length), so the first agent to restart
  // rebuilds the food layout.
  if (world_dirty_) {
    reset_world(rng);
    world_dirty_ = false;
  }
  const auto idx = static_cast<std::size_t>(agent - agent_ids_.front());
  auto& body = world_.body(agent_bodies_[idx]);
  body.position = random_free_point(rng);
  body.velocity = {0.0, 0.0};
  if (idx + 1 == agent_ids_.size()) world_dirty_ = true;
}

void FoodCollectorEnv::apply_action(Academy&, AgentId agent, std::span<const float> action) {
  const auto idx = static_cast<std::size_t>(agent - agent_ids_.front());
  world_.body(agent_bodies_[idx]).velocity = move_direction(static_cast<int>(action[0])) * kSpeed;
}

void FoodCollectorEnv::tick(Academy& academy, double dt) {
  world_.integrate_and_collide(dt);
  Rng& rng = academy.env_rng();
  for (std::size_t i = 0; i < agent_ids_.size(); ++i) {
    if (!academy.episode_active(agent_ids_[i])) continue;
    const auto& body = world_.body(agent_bodies_[i]);
    for (auto food : foods_) {
      auto& f = world_.body(food);
      if (!worldsim::penetration(body, f)) continue;
      academy.add_reward(agent_ids_[i], f.tag == "food_good" ? kGoodReward : kBadReward);
      f.position = random_free_point(rng);
    }
  }
}

void FoodCollectorEnv::observe(const Academy&, AgentId agent,
                               std::span<const std::span<float>> out) const {
  const auto idx = static_cast<std::size_t>(agent - agent_ids_.front());
  const auto& body = world_.body(agent_bodies_[idx]);
  if (visual_size_ > 0) {
    const worldsim::Bounds view{body.position - Vec2{kViewHalf, kViewHalf},
                                body.position + Vec2{kViewHalf, kViewHalf}};
    sensors::grid_render_into(world_, palette_, visual_size_, visual_size_, view, out[0]);
  } else {
    sensors::raycast_sense_into(world_, {body.position, 0.0, body.id}, rays_, out[0]);
  }
}

std::vector<float> FoodCollectorEnv::expert_action(const Academy&, AgentId agent) const {
  const auto idx = static_cast<std::size_t>(agent - agent_ids_.front());
  const Vec2 p = world_.body(agent_bodies_[idx]).position;
  double best = std::numeric_limits<double>::infinity();
  Vec2 target = p;
  for (auto food : foods_) {
    const auto& f = world_.body(food);
    if (f.tag != "food_good") continue;
    const double d = (f.position - p).norm();
    if (d < best) {
      best = d;
      target = f.position;
    }
  }
  const Vec2 d = target - p;
  if (std::abs(d.x) >= std::abs(d.y)) return {d.x < 0 ? 1.0f : 2.0f};
  return {d.y > 0 ? 3.0f : 4.0f};
}

}  // namespace agentsim::envsuite
