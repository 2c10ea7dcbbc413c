#include "agentsim/envsuite/hallway.hpp"

#include <cmath>

namespace agentsim::envsuite {

namespace {

const std::vector<std::string> kTags = {"wall", "cue_orange", "cue_red", "goal_orange", "goal_red"};
constexpr double kRayLength = 20.0;
constexpr double kAgentHalf = 0.4;

worldsim::Body wall(Vec2 centre, Vec2 half) {
  return {.tag = "wall", .shape = worldsim::Aabb{half}, .position = centre};
}

}  // namespace

EnvDefinition HallwayEnv::definition() {
  EnvDefinition def;
  def.name = "Hallway";
  def.behaviors = {{"Hallway",
                    {kernel::ObservationSpec::raycast(kRays, static_cast<int>(kTags.size()), kStack)},
                    kernel::ActionSpec::discrete({kMoveActions})}};
  def.rewards = {{"tick", kTickReward}, {"correct_goal", kCorrectReward}, {"wrong_goal", kWrongReward}};
  def.termination = {"touch correct goal", "touch wrong goal", "max_step"};
  def.decision_interval = kernel::kDefaultDecisionInterval;
  def.max_step = kMaxStep;
  return def;
}

void HallwayEnv::initialize(Academy& academy) {
  world_ = worldsim::World({{-8.5, -2.0}, {8.5, 6.0}}, kSpeed);
  palette_.background = {0.85f, 0.85f, 0.85f};
  palette_.colors = {{"wall", {0.3f, 0.3f, 0.3f}},      {"cue_orange", {1.0f, 0.55f, 0.0f}},
                     {"cue_red", {0.85f, 0.1f, 0.1f}},   {"goal_orange", {1.0f, 0.75f, 0.4f}},
                     {"goal_red", {1.0f, 0.5f, 0.5f}},   {"agent", {0.1f, 0.3f, 0.9f}}};
  // Corridor x in [-8, 8], y in [-1.5, 1.5]; room x in [-2, 2], y in [1.5, 5.5].
  world_.add_body(wall({0.0, -1.75}, {8.5, 0.25}));
  world_.add_body(wall({-5.25, 1.75}, {3.25, 0.25}));
  world_.add_body(wall({5.25, 1.75}, {3.25, 0.25}));
  world_.add_body(wall({-2.25, 3.75}, {0.25, 2.25}));
  world_.add_body(wall({2.25, 3.75}, {0.25, 2.25}));
  world_.add_body(wall({0.0, 5.75}, {2.5, 0.25}));
  world_.add_body(wall({-8.25, 0.0}, {0.25, 2.0}));
  world_.add_body(wall({8.25, 0.0}, {0.25, 2.0}));
  left_goal_ = world_.add_body({.tag = "goal_orange", .shape = worldsim::Aabb{{0.5, 1.5}},
                                .position = {-7.5, 0.0}, .solid = false});
  right_goal_ = world_.add_body({.tag = "goal_red", .shape = worldsim::Aabb{{0.5, 1.5}},
                                 .position = {7.5, 0.0}, .solid = false});
  cue_body_ = world_.add_body({.tag = "cue_orange", .shape = worldsim::Aabb{{0.6, 0.3}},
                               .position = {0.0, 5.0}});
  agent_body_ = world_.add_body({.tag = "agent", .shape = worldsim::Aabb{{kAgentHalf, kAgentHalf}},
                                 .position = {0.0, 3.0}, .kinematic = true, .z_order = 1});
  rays_ = sensors::RaycastConfig::ring(kRays, kRayLength, kTags);
  const auto def = definition();
  agent_id_ = academy.register_agent(def.behaviors[0], def.decision_interval, def.max_step).id;
}

double HallwayEnv::correct_side() const {
  const bool orange = cue_color_ == 0;
  return (orange == (orange_on_left_ == 1)) ? -1.0 : 1.0;
}

void HallwayEnv::on_episode_begin(Academy& academy, AgentId) {
  Rng& rng = academy.env_rng();
  cue_color_ = static_cast<int>(rng.below(2));
  orange_on_left_ = static_cast<int>(rng.below(2));
  world_.body(cue_body_).tag = cue_color_ == 0 ? "cue_orange" : "cue_red";
  world_.body(left_goal_).tag = orange_on_left_ ? "goal_orange" : "goal_red";
  world_.body(right_goal_).tag = orange_on_left_ ? "goal_red" : "goal_orange";
  auto& agent = world_.body(agent_body_);
  agent.position = {rng.uniform(-1.2, 1.2), rng.uniform(2.5, 4.2)};
  agent.velocity = {0.0, 0.0};
}

void HallwayEnv::apply_action(Academy&, AgentId, std::span<const float> action) {
  world_.body(agent_body_).velocity = move_direction(static_cast<int>(action[0])) * kSpeed;
}

void HallwayEnv::tick(Academy& academy, double dt) {
  if (!academy.episode_active(agent_id_)) return;
  world_.integrate_and_collide(dt);
  academy.add_reward(agent_id_, kTickReward);
  const auto& agent = world_.body(agent_body_);
  for (worldsim::BodyId goal : {left_goal_, right_goal_}) {
    if (!worldsim::penetration(agent, world_.body(goal))) continue;
    const double side = goal == left_goal_ ? -1.0 : 1.0;
    academy.add_reward(agent_id_, side == correct_side() ? kCorrectReward : kWrongReward);
    academy.end_episode(agent_id_, false);
    return;
  }
}

void HallwayEnv::observe(const Academy&, AgentId, std::span<const std::span<float>> out) const {
  const auto& agent = world_.body(agent_body_);
  sensors::raycast_sense_into(world_, {agent.position, 0.0, agent.id}, rays_, out[0]);
}

std::vector<float> HallwayEnv::expert_action(const Academy&, AgentId) const {
  const Vec2 p = agent_position();
  if (p.y > 0.2) {
    // Still in the room: line up with the opening, then head down.
    if (p.x > 0.5) return {1.0f};
    if (p.x < -0.5) return {2.0f};
    return {4.0f};
  }
  return {correct_side() < 0 ? 1.0f : 2.0f};
}

}  // namespace agentsim::envsuite
