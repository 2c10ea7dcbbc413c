#pragma once

#include "agentsim/envsuite/common.hpp"

namespace agentsim::envsuite {

// Side-view rally game. Each agent moves a horizontal racket on its half of
// the court; the ball falls under gravity and reflects off rackets and the
// net. One point per episode: letting the ball land on your side or hitting
// it out loses the point.
class TennisEnv : public WorldEnvironment {
 public:
  static constexpr double kWinReward = 1.0;
  static constexpr double kLoseReward = -1.0;
  static constexpr int kMaxStep = 1500;
  static constexpr double kCourtHalf = 8.0;
  static constexpr double kOutX = 8.5;
  static constexpr double kRacketY = 1.5;
  static constexpr double kRacketSpeed = 8.0;
  static constexpr double kGravity = 9.8;
  static constexpr double kBallRadius = 0.2;
  static constexpr double kServeHeight = 5.0;
  static constexpr double kSpinTransfer = 0.5;

  static EnvDefinition definition();

  std::string name() const override { return "Tennis"; }
  void initialize(Academy& academy) override;
  void on_episode_begin(Academy& academy, AgentId agent) override;
  void apply_action(Academy& academy, AgentId agent, std::span<const float> action) override;
  void tick(Academy& academy, double dt) override;
  void observe(const Academy& academy, AgentId agent,
               std::span<const std::span<float>> out) const override;

  Vec2 ball_position() const { return world_.body(ball_).position; }
  Vec2 ball_velocity() const { return world_.body(ball_).velocity; }
  Vec2 racket_position(int side) const { return world_.body(rackets_[static_cast<std::size_t>(side)]).position; }
  int last_hitter() const { return last_hitter_; }
  // Places the ball directly (tests).
  void set_ball(Vec2 position, Vec2 velocity);
  void set_racket(int side, double x);

 private:
  void finish_point(Academy& academy, int loser);

  AgentId agents_[2] = {-1, -1};
  worldsim::BodyId rackets_[2] = {-1, -1};
  worldsim::BodyId ball_ = -1;
  worldsim::BodyId net_ = -1;
  int last_hitter_ = -1;
  bool world_dirty_ = true;
};

}  // namespace agentsim::envsuite
