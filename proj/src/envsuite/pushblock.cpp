#include "agentsim/envsuite/pushblock.hpp"

#include <cmath>

namespace agentsim::envsuite {

namespace {

const std::vector<std::string> kTags = {"block", "goal", "wall"};
const ParamDef kBlockHalfParam{"block_half", PushBlockEnv::kBlockHalf, 0.5, 1.5};
constexpr double kRayLength = 15.0;

}  // namespace

EnvDefinition PushBlockEnv::definition() {
  EnvDefinition def;
  def.name = "PushBlock";
  def.behaviors = {{"PushBlock",
                    {kernel::ObservationSpec::raycast(kRays, static_cast<int>(kTags.size()))},
                    kernel::ActionSpec::discrete({kMoveActions})}};
  def.rewards = {{"tick", kTickReward}, {"block_in_goal", kGoalReward}};
  def.termination = {"block enters goal strip", "max_step"};
  def.parameters = {kBlockHalfParam};
  def.decision_interval = kernel::kDefaultDecisionInterval;
  def.max_step = kMaxStep;
  return def;
}

std::map<std::string, double> PushBlockEnv::parameter_defaults() const {
  return {{kBlockHalfParam.name, kBlockHalfParam.default_value}};
}

void PushBlockEnv::initialize(Academy& academy) {
  world_ = worldsim::World({{0.0, 0.0}, {kArena, kArena}}, kSpeed);
  palette_.background = {0.8f, 0.8f, 0.8f};
  palette_.colors = {{"wall", {0.3f, 0.3f, 0.3f}},
                     {"goal", {0.1f, 0.8f, 0.3f}},
                     {"block", {0.9f, 0.6f, 0.2f}},
                     {"agent", {0.1f, 0.3f, 0.9f}}};
  add_walls(world_.bounds(), 1.0);
  goal_body_ = world_.add_body({.tag = "goal",
                                .shape = worldsim::Aabb{{kArena / 2, (kArena - kGoalLine) / 2}},
                                .position = {kArena / 2, (kArena + kGoalLine) / 2},
                                .solid = false});
  block_body_ = world_.add_body({.tag = "block", .shape = worldsim::Aabb{{kBlockHalf, kBlockHalf}},
                                 .position = {5.0, 5.0}, .kinematic = true, .z_order = 1});
  agent_body_ = world_.add_body({.tag = "agent", .shape = worldsim::Aabb{{kAgentHalf, kAgentHalf}},
                                 .position = {5.0, 1.0}, .kinematic = true, .z_order = 2});
  rays_ = sensors::RaycastConfig::ring(kRays, kRayLength, kTags);
  const auto def = definition();
  agent_id_ = academy.register_agent(def.behaviors[0], def.decision_interval, def.max_step).id;
}

void PushBlockEnv::place(Vec2 agent, Vec2 block) {
  world_.body(agent_body_).position = agent;
  world_.body(agent_body_).velocity = {0.0, 0.0};
  world_.body(block_body_).position = block;
  world_.body(block_body_).velocity = {0.0, 0.0};
}

void PushBlockEnv::on_episode_begin(Academy& academy, AgentId) {
  Rng& rng = academy.env_rng();
  const double half = read_param(academy, kBlockHalfParam);
  world_.body(block_body_).shape = worldsim::Aabb{{half, half}};
  const Vec2 block{rng.uniform(2.5, 7.5), rng.uniform(3.0, 6.0)};
  Vec2 agent;
  do {
    agent = {rng.uniform(kAgentHalf + 0.2, kArena - kAgentHalf - 0.2),
             rng.uniform(kAgentHalf + 0.2, kGoalLine - 1.0)};
  } while (std::abs(agent.x - block.x) < half + kAgentHalf + 0.3 &&
           std::abs(agent.y - block.y) < half + kAgentHalf + 0.3);
  place(agent, block);
}

void PushBlockEnv::apply_action(Academy&, AgentId, std::span<const float> action) {
  world_.body(agent_body_).velocity = move_direction(static_cast<int>(action[0])) * kSpeed;
}

void PushBlockEnv::tick(Academy& academy, double dt) {
  if (!academy.episode_active(agent_id_)) return;
  world_.integrate_and_collide(dt);
  auto& agent = world_.body(agent_body_);
  auto& block = world_.body(block_body_);
  if (auto push = worldsim::penetration(agent, block)) {
    block.position += push->normal * push->depth;
    world_.resolve_static();
    // Block pinned against a wall: the agent stops at its face.
    if (auto back = worldsim::penetration(agent, block)) {
      agent.position -= back->normal * back->depth;
      world_.resolve_static();
    }
  }
  block.velocity = {0.0, 0.0};
  academy.add_reward(agent_id_, kTickReward);
  const double half = std::get<worldsim::Aabb>(block.shape).half.y;
  if (block.position.y + half > kGoalLine) {
    academy.add_reward(agent_id_, kGoalReward);
    academy.end_episode(agent_id_, false);
  }
}

void PushBlockEnv::observe(const Academy&, AgentId, std::span<const std::span<float>> out) const {
  const auto& agent = world_.body(agent_body_);
  sensors::raycast_sense_into(world_, {agent.position, 0.0, agent.id}, rays_, out[0]);
}

std::vector<float> PushBlockEnv::expert_action(const Academy&, AgentId) const {
  const Vec2 a = agent_position();
  const Vec2 b = block_position();
  const double half = std::get<worldsim::Aabb>(world_.body(block_body_).shape).half.x;
  const double dx = b.x - a.x;
  const bool below = a.y + kAgentHalf < b.y - half + 0.05;
  if (below) {
    if (dx > 0.3) return {2.0f};
    if (dx < -0.3) return {1.0f};
    return {3.0f};
  }
  if (std::abs(dx) < half + kAgentHalf + 0.1) {
    // Beside or above the block: step sideways until clear, away from walls.
    const bool go_left = dx > 0.0 ? a.x - 1.0 > kAgentHalf : a.x + 1.0 > kArena - kAgentHalf;
    return {go_left ? 1.0f : 2.0f};
  }
  return {4.0f};
}

}  // namespace agentsim::envsuite
