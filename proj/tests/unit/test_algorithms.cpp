#include <doctest.h>

#include <cmath>
#include <map>

#include "agentsim/core/rng.hpp"
#include "agentsim/envsuite/gridworld.hpp"
#include "agentsim/envsuite/registry.hpp"
#include "agentsim/trainer/adam.hpp"
#include "agentsim/trainer/config.hpp"
#include "agentsim/trainer/curriculum.hpp"
#include "agentsim/trainer/elo.hpp"
#include "agentsim/trainer/gae.hpp"
#include "agentsim/trainer/icm.hpp"
#include "agentsim/trainer/losses.hpp"
#include "agentsim/trainer/self_play.hpp"
#include "helpers.hpp"

using namespace agentsim;
using namespace agentsim::trainer;
using Json = nlohmann::json;

namespace {

// A_t = sum_l (gamma lambda)^l delta_{t+l}, stopping after the first done.
std::vector<double> brute_force_gae(const std::vector<double>& r, const std::vector<double>& v,
                                    const std::vector<std::uint8_t>& done, double bootstrap,
                                    double gamma, double lambda) {
  const std::size_t n = r.size();
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    double a = 0.0, w = 1.0;
    for (std::size_t k = t; k < n; ++k) {
      const double next_v = k + 1 < n ? v[k + 1] : bootstrap;
      const double delta = r[k] + gamma * next_v * (done[k] ? 0.0 : 1.0) - v[k];
      a += w * delta;
      if (done[k]) break;
      w *= gamma * lambda;
    }
    out[t] = a;
  }
  return out;
}

}  // namespace

TEST_CASE("GAE worked example") {
  const std::vector<double> r{1, 1}, v{0.5, 0.5};
  const std::vector<std::uint8_t> d{0, 1};
  const auto g = gae(r, v, d, 0.0, 0.9, 0.95);
  CHECK(g.advantages[0] == doctest::Approx(1.3775));
  CHECK(g.advantages[1] == doctest::Approx(0.5));
  CHECK(g.returns[0] == doctest::Approx(1.8775));
}

TEST_CASE("GAE matches the brute-force sum on 1000 random sequences") {
  Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(rng.below(40) + 1);
    std::vector<double> r(n), v(n);
    std::vector<std::uint8_t> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = rng.uniform(-1, 1);
      v[i] = rng.uniform(-2, 2);
      d[i] = rng.bernoulli(0.1) ? 1 : 0;
    }
    const double boot = rng.uniform(-2, 2), gamma = rng.uniform(0.8, 1.0), lambda = rng.uniform(0.0, 1.0);
    const auto g = gae(r, v, d, boot, gamma, lambda);
    const auto oracle = brute_force_gae(r, v, d, boot, gamma, lambda);
    for (std::size_t i = 0; i < n; ++i) {
      REQUIRE(std::abs(g.advantages[i] - oracle[i]) < 1e-5);
      REQUIRE(g.returns[i] == doctest::Approx(g.advantages[i] + v[i]));
    }
  }
}

TEST_CASE("GAE with lambda 1 equals the Monte-Carlo return minus V") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(rng.below(30) + 1);
    std::vector<double> r(n), v(n);
    std::vector<std::uint8_t> d(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = rng.uniform(-1, 1);
      v[i] = rng.uniform(-1, 1);
    }
    d[n - 1] = 1;
    const double gamma = 0.97;
    const auto g = gae(r, v, d, 123.0, gamma, 1.0);
    for (std::size_t t = 0; t < n; ++t) {
      double mc = 0.0;
      for (std::size_t k = n; k-- > t;) mc = r[k] + gamma * mc;
      CHECK(g.advantages[t] + v[t] == doctest::Approx(mc).epsilon(1e-9));
    }
  }
}

TEST_CASE("GAE length mismatch") {
  const std::vector<double> r{1, 2}, v{1};
  const std::vector<std::uint8_t> d{0, 0};
  CHECK_ERROR_CODE(gae(r, v, d, 0.0, 0.9, 0.9), ErrorCode::kLengthMismatch);
}

TEST_CASE("PPO clip term") {
  CHECK(ppo_clip_term(2.0, 1.0, 0.2) == doctest::Approx(1.2));
  CHECK(ppo_clip_term(0.5, -1.0, 0.2) == doctest::Approx(-0.8));
  CHECK(ppo_clip_term(1.1, 1.0, 0.2) == doctest::Approx(1.1));
  CHECK(ppo_clip_term(0.5, 1.0, 0.2) == doctest::Approx(0.5));
}

TEST_CASE("ELO") {
  const auto [a, b] = elo_update(1200, 1200, 1.0);
  CHECK(a == doctest::Approx(1208));
  CHECK(b == doctest::Approx(1192));
  CHECK(elo_expected(1400, 1200) == doctest::Approx(1.0 / (1.0 + std::pow(10.0, -0.5))));
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double ra = elo_quantize(rng.uniform(800, 1600)), rb = elo_quantize(rng.uniform(800, 1600));
    const double s = static_cast<double>(rng.below(3)) / 2.0;
    const auto [na, nb] = elo_update(ra, rb, s);
    CHECK(na + nb == ra + rb);
  }
  CHECK(score_from_return(0.3) == 1.0);
  CHECK(score_from_return(-0.3) == 0.0);
  CHECK(score_from_return(0.0) == 0.5);
}

TEST_CASE("opponent selection") {
  Rng rng(17);
  SnapshotPool empty(4);
  CHECK_FALSE(select_opponent(empty, 0.0, rng).has_value());

  SnapshotPool pool(4);
  for (int i = 0; i < 6; ++i) pool.push({{}, 1200.0, static_cast<std::uint64_t>(i)});
  REQUIRE(pool.size() == 4);
  CHECK(pool.at(0).step == 2);

  std::map<std::size_t, int> counts;
  for (int i = 0; i < 10000; ++i) {
    const auto o = select_opponent(pool, 0.0, rng);
    REQUIRE(o.has_value());
    ++counts[*o];
  }
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(counts[k] / 10000.0 - 0.25) <= 0.02);

  int current = 0;
  for (int i = 0; i < 10000; ++i) current += select_opponent(pool, 0.5, rng).has_value() ? 0 : 1;
  CHECK(current / 10000.0 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("curriculum advances exactly at its thresholds") {
  const auto plan = lesson_plan_from_json(Json::parse(R"({"lessons": [
      {"params": {"grid_size": 5}, "completion": {"measure": "mean_reward", "threshold": 0.8, "min_lesson_length": 100}},
      {"params": {"grid_size": 7}, "completion": {"measure": "mean_reward", "threshold": 0.7, "min_lesson_length": 100}},
      {"params": {"grid_size": 9}}]})"));
  Curriculum c(plan);
  CHECK_FALSE(c.advance(0.79, 500));
  CHECK_FALSE(c.advance(0.95, 99));
  CHECK(c.lesson() == 0);
  CHECK(c.advance(0.8, 100));
  CHECK(c.lesson() == 1);
  CHECK_FALSE(c.advance(0.69, 100));
  CHECK(c.advance(0.7, 100));
  CHECK(c.final_lesson());
  CHECK_FALSE(c.advance(1.0, 1000));
  CHECK(c.lesson() == 2);

  auto academy = envsuite::make_env("GridWorld", {}, 0);
  academy->reset(0);
  c.apply(*academy);
  academy->reset(1);
  CHECK(static_cast<envsuite::GridWorldEnv&>(academy->environment()).grid_size() == 9);

  CHECK(lesson_plan_from_json(to_json(plan)).lessons.size() == 3);
  CHECK_ERROR_CODE(Curriculum(LessonPlan{}), ErrorCode::kInvalidConfig);
  CHECK_ERROR_CODE(lesson_plan_from_json(Json::parse(R"([{"params": {}, "completion": {"measure": "luck"}}])")),
                   ErrorCode::kInvalidConfig);
}

TEST_CASE("ICM intrinsic reward and learning") {
  CHECK(intrinsic_reward(2.0, 0.01) == doctest::Approx(0.01));

  Rng rng(4);
  const auto action = kernel::ActionSpec::discrete({5});
  Icm icm(6, action, {.enabled = true, .eta = 0.01, .beta = 0.2, .feature_dim = 8}, rng, 1e-3);
  Eigen::MatrixXf obs(6, 64), next(6, 64), actions(1, 64);
  for (int i = 0; i < 64; ++i) {
    const int a = static_cast<int>(rng.below(5));
    actions(0, i) = static_cast<float>(a);
    for (int k = 0; k < 6; ++k) obs(k, i) = static_cast<float>(rng.uniform(-1, 1));
    next.col(i) = obs.col(i);
    next(a % 6, i) += 0.5f;
  }
  const float first = icm.update(obs, actions, next).forward;
  float last = first;
  for (int i = 0; i < 100; ++i) last = icm.update(obs, actions, next).forward;
  CHECK(last < first);
  const auto r = icm.intrinsic_rewards(obs, actions, next);
  CHECK(r.size() == 64);
  CHECK((r.array() >= 0.0f).all());
}

TEST_CASE("behavioral cloning loss") {
  const kernel::BehaviorSpec spec{"B", {kernel::ObservationSpec::vector(2)}, kernel::ActionSpec::discrete({3})};
  Network<double> net(Topology::for_behavior(spec, {4}));
  net.params().setZero();
  Network<double>::Matrix obs = Network<double>::Matrix::Random(2, 3);
  Network<double>::Matrix act(1, 3);
  act << 0, 1, 2;
  Network<double>::Vector g;
  CHECK(bc_loss(net, obs, act, &g) == doctest::Approx(std::log(3.0)));
  CHECK_ERROR_CODE(bc_loss(net, Network<double>::Matrix(2, 0), Network<double>::Matrix(1, 0), nullptr),
                   ErrorCode::kEmptyBatch);
}

TEST_CASE("Adam and gradient clipping") {
  Adam adam(2, {.lr = 0.1});
  Eigen::VectorXf p(2), g(2);
  p << 1.0f, -1.0f;
  g << 0.5f, -2.0f;
  adam.step(p, g);
  // First step moves each coordinate by lr against the gradient sign.
  CHECK(p[0] == doctest::Approx(0.9).epsilon(1e-5));
  CHECK(p[1] == doctest::Approx(-0.9).epsilon(1e-5));
  CHECK(adam.steps() == 1);

  Eigen::VectorXf big(2);
  big << 3.0f, 4.0f;
  CHECK(clip_grad_norm(big, 1.0) == doctest::Approx(5.0));
  CHECK(big.norm() == doctest::Approx(1.0));
  Eigen::VectorXf small(2);
  small << 0.3f, 0.4f;
  clip_grad_norm(small, 1.0);
  CHECK(small[0] == 0.3f);
}

TEST_CASE("training config parsing") {
  const auto c = config_from_json(Json::parse(R"({
      "env": "GridWorld", "env_params": {"grid_size": 7, "num_obstacles": {"uniform": [0, 2]}},
      "seed": 5, "total_steps": 1000, "hidden": [16], "activation": "relu",
      "self_play": {"enabled": false},
      "eval_splits": {"train": {"grid_size": 5}, "test": {"grid_size": 9}}})"));
  CHECK(c.env == "GridWorld");
  CHECK(c.env_params.at("grid_size").fixed == 7.0);
  CHECK_FALSE(c.env_params.at("num_obstacles").fixed.has_value());
  CHECK(c.hidden == std::vector<int>{16});
  CHECK(c.activation == Activation::kRelu);
  CHECK(c.eval_splits.size() == 2);
  CHECK(config_from_json(to_json(c)).seed == 5);
  CHECK(config_hash(c) == config_hash(config_from_json(to_json(c))));
  CHECK(config_hash(c).size() == 16);

  auto other = c;
  other.seed = 6;
  CHECK(config_hash(other) != config_hash(c));

  CHECK_ERROR_CODE(config_from_json(Json::parse(R"({"bogus": 1})")), ErrorCode::kInvalidConfig);
  CHECK_ERROR_CODE(config_from_json(Json::parse(R"({"gamma": 1.5})")), ErrorCode::kInvalidConfig);
  CHECK_ERROR_CODE(config_from_json(Json::parse(R"({"algorithm": "dqn"})")), ErrorCode::kInvalidConfig);
}
