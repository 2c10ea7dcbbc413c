#include "agentsim/envsuite/tennis.hpp"

#include <algorithm>
#include <cmath>

namespace agentsim::envsuite {

namespace {

constexpr Vec2 kRacketHalf{0.6, 0.1};
constexpr Vec2 kNetHalf{0.1, 0.6};
constexpr double kMinBounce = 6.0;
constexpr double kMinReturn = 2.0;
constexpr double kMaxReturn = 9.0;
constexpr double kRacketInner = 0.7;
constexpr double kRacketOuter = 7.5;

// +1 for the left agent, -1 for the right: observations and actions are
// mirrored so both agents play the same game from their own point of view.
double mirror(int side) { return side == 0 ? 1.0 : -1.0; }

}  // namespace

EnvDefinition TennisEnv::definition() {
  EnvDefinition def;
  def.name = "Tennis";
  def.behaviors = {{"Tennis", {kernel::ObservationSpec::vector(8)}, kernel::ActionSpec::discrete({3})}};
  def.rewards = {{"win_point", kWinReward}, {"lose_point", kLoseReward}};
  def.termination = {"ball lands on a side", "ball hit out", "max_step (draw)"};
  def.decision_interval = kernel::kDefaultDecisionInterval;
  def.max_step = kMaxStep;
  def.agents = 2;
  return def;
}

void TennisEnv::initialize(Academy& academy) {
  world_ = worldsim::World({{-9.0, 0.0}, {9.0, 8.0}});
  palette_.background = {0.2f, 0.45f, 0.25f};
  palette_.colors = {{"net", {0.95f, 0.95f, 0.95f}},
                     {"racket", {0.1f, 0.3f, 0.9f}},
                     {"ball", {0.9f, 0.9f, 0.2f}}};
  net_ = world_.add_body({.tag = "net", .shape = worldsim::Aabb{kNetHalf}, .position = {0.0, kNetHalf.y}});
  for (int side = 0; side < 2; ++side) {
    rackets_[side] = world_.add_body({.tag = "racket",
                                      .shape = worldsim::Aabb{kRacketHalf},
                                      .position = {-4.0 * mirror(side), kRacketY},
                                      .kinematic = true,
                                      .solid = false,
                                      .z_order = 1});
  }
  ball_ = world_.add_body({.tag = "ball",
                           .shape = worldsim::Circle{kBallRadius},
                           .position = {-4.0, kServeHeight},
                           .acceleration = {0.0, -kGravity},
                           .kinematic = true,
                           .solid = false,
                           .z_order = 2});
  const auto def = definition();
  for (int side = 0; side < 2; ++side) {
    agents_[side] = academy.register_agent(def.behaviors[0], def.decision_interval, def.max_step).id;
  }
}

void TennisEnv::set_ball(Vec2 position, Vec2 velocity) {
  world_.body(ball_).position = position;
  world_.body(ball_).velocity = velocity;
}

void TennisEnv::set_racket(int side, double x) {
  world_.body(rackets_[side]).position = {x, kRacketY};
  world_.body(rackets_[side]).velocity = {0.0, 0.0};
}

void TennisEnv::on_episode_begin(Academy& academy, AgentId agent) {
  if (!world_dirty_) {
    if (agent == agents_[1]) world_dirty_ = true;
    return;
  }
  Rng& rng = academy.env_rng();
  const int server = static_cast<int>(rng.below(2));
  set_ball({-mirror(server) * rng.uniform(2.5, 5.5), kServeHeight}, {0.0, 0.0});
  set_racket(0, -4.0);
  set_racket(1, 4.0);
  last_hitter_ = -1;
  world_dirty_ = agent == agents_[1];
}

void TennisEnv::apply_action(Academy&, AgentId agent, std::span<const float> action) {
  const int side = agent == agents_[0] ? 0 : 1;
  const int a = static_cast<int>(action[0]);
  const double dir = a == 1 ? -1.0 : (a == 2 ? 1.0 : 0.0);
  world_.body(rackets_[side]).velocity = {mirror(side) * dir * kRacketSpeed, 0.0};
}

void TennisEnv::finish_point(Academy& academy, int loser) {
  const int winner = 1 - loser;
  academy.add_reward(agents_[winner], kWinReward);
  academy.add_reward(agents_[loser], kLoseReward);
  academy.end_episode(agents_[0], false);
  academy.end_episode(agents_[1], false);
}

void TennisEnv::tick(Academy& academy, double dt) {
  if (!academy.episode_active(agents_[0]) || !academy.episode_active(agents_[1])) return;
  world_.integrate_and_collide(dt);

  for (int side = 0; side < 2; ++side) {
    auto& racket = world_.body(rackets_[side]);
    const double lo = side == 0 ? -kRacketOuter : kRacketInner;
    const double hi = side == 0 ? -kRacketInner : kRacketOuter;
    const double x = std::clamp(racket.position.x, lo, hi);
    if (x != racket.position.x) {
      racket.position.x = x;
      racket.velocity.x = 0.0;
    }
  }

  auto& ball = world_.body(ball_);
  for (int side = 0; side < 2; ++side) {
    const auto& racket = world_.body(rackets_[side]);
    if (ball.velocity.y >= 0.0 || ball.position.y <= racket.position.y) continue;
    if (!worldsim::penetration(ball, racket)) continue;
    // Reflect off the racket face and send the ball toward the other half,
    // adding a share of the racket's own motion.
    ball.position.y = racket.position.y + kRacketHalf.y + kBallRadius;
    ball.velocity.y = std::max(std::abs(ball.velocity.y), kMinBounce);
    const double toward = mirror(side);
    double vx = toward * std::abs(ball.velocity.x) + kSpinTransfer * racket.velocity.x;
    vx = toward * std::clamp(toward * vx, kMinReturn, kMaxReturn);
    ball.velocity.x = vx;
    last_hitter_ = side;
  }
  if (auto c = worldsim::penetration(ball, world_.body(net_))) {
    const Vec2 out = c->normal * -1.0;  // net -> ball
    ball.position += out * c->depth;
    const double vn = ball.velocity.dot(out);
    if (vn < 0.0) ball.velocity -= out * (2.0 * vn);
  }

  if (ball.position.y - kBallRadius <= 0.0) {
    finish_point(academy, ball.position.x < 0.0 ? 0 : 1);
  } else if (std::abs(ball.position.x) > kOutX) {
    const int side_out = ball.position.x < 0.0 ? 0 : 1;
    finish_point(academy, last_hitter_ >= 0 ? last_hitter_ : side_out);
  }
}

void TennisEnv::observe(const Academy&, AgentId agent, std::span<const std::span<float>> out) const {
  const int side = agent == agents_[0] ? 0 : 1;
  const double m = mirror(side);
  const auto& me = world_.body(rackets_[side]);
  const auto& opp = world_.body(rackets_[1 - side]);
  const auto& ball = world_.body(ball_);
  const float hitter = last_hitter_ < 0 ? 0.0f : (last_hitter_ == side ? 1.0f : -1.0f);
  const float values[8] = {
      static_cast<float>(m * me.position.x / kCourtHalf),
      static_cast<float>(m * me.velocity.x / kRacketSpeed),
      static_cast<float>(m * ball.position.x / kCourtHalf),
      static_cast<float>(ball.position.y / kCourtHalf),
      static_cast<float>(m * ball.velocity.x / 10.0),
      static_cast<float>(ball.velocity.y / 10.0),
      static_cast<float>(m * opp.position.x / kCourtHalf),
      hitter,
  };
  std::copy(std::begin(values), std::end(values), out[0].begin());
}

}  // namespace agentsim::envsuite
