#include "agentsim/envsuite/strikers_vs_goalie.hpp"

#include <cmath>

namespace agentsim::envsuite {

namespace {

const std::vector<std::string> kTags = {"ball", "goal", "striker", "goalie", "wall"};
constexpr double kRayLength = 20.0;
constexpr double kAgentHalf = 0.4;
constexpr double kBallRadius = 0.35;
constexpr double kBallDamping = 0.99;  // per tick
constexpr double kGoalDepth = 1.5;

worldsim::Body wall(Vec2 centre, Vec2 half) {
  return {.tag = "wall", .shape = worldsim::Aabb{half}, .position = centre};
}

}  // namespace

EnvDefinition StrikersVsGoalieEnv::definition() {
  EnvDefinition def;
  def.name = "StrikersVsGoalie";
  const auto obs = kernel::ObservationSpec::raycast(kRays, static_cast<int>(kTags.size()));
  def.behaviors = {{"Striker", {obs}, kernel::ActionSpec::discrete({kMoveActions})},
                   {"Goalie", {obs}, kernel::ActionSpec::discrete({kMoveActions})}};
  def.rewards = {{"striker_tick", kStrikerTick},
                 {"goalie_tick", kGoalieTick},
                 {"goal_scored", kGoalReward},
                 {"goal_conceded", -kGoalReward}};
  def.termination = {"goal scored", "max_step"};
  def.decision_interval = kernel::kDefaultDecisionInterval;
  def.max_step = kMaxStep;
  def.agents = 3;
  return def;
}

void StrikersVsGoalieEnv::initialize(Academy& academy) {
  world_ = worldsim::World({{-kGoalDepth - 0.5, -0.5}, {kFieldX + 0.5, kFieldY + 0.5}}, kSpeed);
  palette_.background = {0.2f, 0.55f, 0.25f};
  palette_.colors = {{"wall", {0.4f, 0.4f, 0.4f}},   {"goal", {1.0f, 1.0f, 1.0f}},
                     {"striker", {0.1f, 0.3f, 0.9f}}, {"goalie", {0.85f, 0.2f, 0.2f}},
                     {"ball", {0.95f, 0.95f, 0.3f}}};
  const double t = 0.5;
  world_.add_body(wall({kFieldX / 2, -t / 2}, {kFieldX / 2 + t, t / 2}));
  world_.add_body(wall({kFieldX / 2, kFieldY + t / 2}, {kFieldX / 2 + t, t / 2}));
  world_.add_body(wall({kFieldX + t / 2, kFieldY / 2}, {t / 2, kFieldY / 2}));
  world_.add_body(wall({-t / 2, kMouthLo / 2}, {t / 2, kMouthLo / 2}));
  world_.add_body(wall({-t / 2, (kMouthHi + kFieldY) / 2}, {t / 2, (kFieldY - kMouthHi) / 2}));
  // Goal box behind the mouth.
  world_.add_body(wall({-kGoalDepth - t / 2, 5.0}, {t / 2, (kMouthHi - kMouthLo) / 2 + t}));
  world_.add_body(wall({-kGoalDepth / 2, kMouthLo - t / 2}, {kGoalDepth / 2, t / 2}));
  world_.add_body(wall({-kGoalDepth / 2, kMouthHi + t / 2}, {kGoalDepth / 2, t / 2}));
  world_.add_body({.tag = "goal",
                   .shape = worldsim::Aabb{{kGoalDepth / 2, (kMouthHi - kMouthLo) / 2}},
                   .position = {-kGoalDepth / 2, (kMouthLo + kMouthHi) / 2},
                   .solid = false});
  ball_ = world_.add_body({.tag = "ball",
                           .shape = worldsim::Circle{kBallRadius},
                           .position = {8.0, 5.0},
                           .kinematic = true,
                           .solid = false,
                           .z_order = 2});
  const auto def = definition();
  for (int i = 0; i < 3; ++i) {
    const auto& spec = def.behaviors[i < 2 ? 0 : 1];
    bodies_.push_back(world_.add_body({.tag = i < 2 ? "striker" : "goalie",
                                       .shape = worldsim::Aabb{{kAgentHalf, kAgentHalf}},
                                       .position = {8.0, 5.0},
                                       .kinematic = true,
                                       .z_order = 1}));
    agents_.push_back(academy.register_agent(spec, def.decision_interval, def.max_step).id);
  }
  rays_ = sensors::RaycastConfig::ring(kRays, kRayLength, kTags);
}

std::size_t StrikersVsGoalieEnv::index_of(AgentId agent) const {
  return static_cast<std::size_t>(agent - agents_.front());
}

Vec2 StrikersVsGoalieEnv::agent_position(AgentId agent) const {
  return world_.body(bodies_[index_of(agent)]).position;
}

void StrikersVsGoalieEnv::set_ball(Vec2 position, Vec2 velocity) {
  world_.body(ball_).position = position;
  world_.body(ball_).velocity = velocity;
}

void StrikersVsGoalieEnv::on_episode_begin(Academy& academy, AgentId agent) {
  Rng& rng = academy.env_rng();
  if (world_dirty_) {
    set_ball({rng.uniform(7.0, 10.0), rng.uniform(3.0, 7.0)}, {0.0, 0.0});
    world_dirty_ = false;
  }
  const std::size_t i = index_of(agent);
  auto& body = world_.body(bodies_[i]);
  body.position = i < 2 ? Vec2{rng.uniform(11.0, 14.5), rng.uniform(1.5, 8.5)}
                        : Vec2{1.5, rng.uniform(4.0, 6.0)};
  body.velocity = {0.0, 0.0};
  if (i + 1 == agents_.size()) world_dirty_ = true;
}

void StrikersVsGoalieEnv::apply_action(Academy&, AgentId agent, std::span<const float> action) {
  world_.body(bodies_[index_of(agent)]).velocity =
      move_direction(static_cast<int>(action[0])) * kSpeed;
}

void StrikersVsGoalieEnv::tick(Academy& academy, double dt) {
  for (AgentId a : agents_) {
    if (!academy.episode_active(a)) return;
  }
  auto& ball = world_.body(ball_);
  ball.velocity = ball.velocity * kBallDamping;
  world_.integrate_and_collide(dt);

  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    const auto& body = world_.body(bodies_[i]);
    auto c = worldsim::penetration(body, ball);
    if (!c) continue;
    ball.position += c->normal * c->depth;
    ball.velocity = c->normal * kKickSpeed + body.velocity * 0.5;
  }
  // Ball bounces off walls with perfect reflection.
  for (const auto& b : world_.bodies()) {
    if (!b.enabled || b.kinematic || !b.solid) continue;
    auto c = worldsim::penetration(ball, b);
    if (!c) continue;
    const Vec2 out = c->normal * -1.0;
    ball.position += out * c->depth;
    const double vn = ball.velocity.dot(out);
    if (vn < 0.0) ball.velocity -= out * (2.0 * vn);
  }

  for (std::size_t i = 0; i < agents_.size(); ++i) {
    academy.add_reward(agents_[i], i < 2 ? kStrikerTick : kGoalieTick);
  }
  if (ball.position.x < -kBallRadius) {
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      academy.add_reward(agents_[i], i < 2 ? kGoalReward : -kGoalReward);
    }
    for (AgentId a : agents_) academy.end_episode(a, false);
  }
}

void StrikersVsGoalieEnv::observe(const Academy&, AgentId agent,
                                  std::span<const std::span<float>> out) const {
  const auto& body = world_.body(bodies_[index_of(agent)]);
  sensors::raycast_sense_into(world_, {body.position, 0.0, body.id}, rays_, out[0]);
}

}  // namespace agentsim::envsuite
