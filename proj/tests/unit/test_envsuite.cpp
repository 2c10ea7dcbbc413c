#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "agentsim/core/rng.hpp"
#include "agentsim/envsuite/basic.hpp"
#include "agentsim/envsuite/gridworld.hpp"
#include "agentsim/envsuite/registry.hpp"
#include "agentsim/trainer/rollout.hpp"
#include "helpers.hpp"

using namespace agentsim;
using namespace agentsim::kernel;
using envsuite::Cell;
using envsuite::GridWorldEnv;

namespace {

ActionMap constant(const StepOutcome& out, float v) {
  ActionMap m;
  for (const auto& [name, b] : out.decisions) {
    m[name].agent_ids = b.agent_ids;
    m[name].values.assign(b.size() * 1, v);
  }
  return m;
}

// Plays `action` until the first terminal and returns its cumulative return.
double play_constant(const std::string& env, float action, int* decisions = nullptr) {
  auto academy = envsuite::make_env(env, {}, 1);
  auto out = academy->reset(1);
  double ret = 0.0;
  int n = 0;
  for (int i = 0; i < 1000; ++i) {
    out = academy->step(constant(out, action));
    ++n;
    const auto& t = out.terminals.at(env);
    if (t.size() > 0) {
      ret += t.rewards[0];
      if (decisions) *decisions = n;
      return ret;
    }
    ret += out.decisions.at(env).rewards[0];
  }
  FAIL("no terminal");
  return ret;
}

}  // namespace

TEST_CASE("registry lists the suite and rejects unknown names") {
  CHECK(envsuite::environment_names().size() == 7);
  CHECK_ERROR_CODE(envsuite::make_env("Walker", {}, 0), ErrorCode::kUnknownEnvironment);
  CHECK_ERROR_CODE(envsuite::definition("Walker"), ErrorCode::kUnknownEnvironment);
  for (const auto& name : envsuite::environment_names()) {
    CAPTURE(name);
    auto academy = envsuite::make_env(name, {}, 0);
    const auto def = envsuite::definition(name);
    CHECK(academy->behaviors().size() == def.behaviors.size());
    for (std::size_t i = 0; i < def.behaviors.size(); ++i) {
      CHECK(academy->behavior(def.behaviors[i].name) == def.behaviors[i]);
    }
    CHECK(academy->agents().size() == static_cast<std::size_t>(def.agents));
  }
}

TEST_CASE("Basic manifest is Vector(1), Discrete([3])") {
  auto academy = envsuite::make_env("Basic", {}, 0);
  REQUIRE(academy->behaviors().size() == 1);
  const auto& spec = academy->behaviors()[0];
  CHECK(spec.name == "Basic");
  CHECK(spec.observations == std::vector<ObservationSpec>{ObservationSpec::vector(1)});
  CHECK(spec.action == ActionSpec::discrete({3}));
}

TEST_CASE("Basic enumerations") {
  int n = 0;
  CHECK(play_constant("Basic", 2.0f, &n) == doctest::Approx(0.93).epsilon(1e-6));
  CHECK(n == 7);
  CHECK(play_constant("Basic", 1.0f, &n) == doctest::Approx(0.07).epsilon(1e-6));
  CHECK(n == 3);
}

TEST_CASE("GridWorld parameters apply at the next reset") {
  auto academy = envsuite::make_env("GridWorld", {{"grid_size", 7.0}}, 0);
  academy->reset(0);
  auto& env = static_cast<GridWorldEnv&>(academy->environment());
  CHECK(env.grid_size() == 7);
  academy->set_environment_parameter("grid_size", 6.0);
  CHECK(env.grid_size() == 7);
  academy->reset(0);
  CHECK(env.grid_size() == 6);
  CHECK(env.obstacles().size() == 1);
}

TEST_CASE("GridWorld: stepping onto an adjacent goal pays 0.99 and ends") {
  auto academy = envsuite::make_env("GridWorld", {}, 0);
  auto out = academy->reset(0);
  auto& env = static_cast<GridWorldEnv&>(academy->environment());
  env.set_layout(5, {1, 1}, {2, 1}, {{4, 4}});
  out = academy->step(constant(out, 2.0f));  // +x
  const auto& t = out.terminals.at("GridWorld");
  REQUIRE(t.size() == 1);
  CHECK(t.rewards[0] == doctest::Approx(0.99));
  CHECK(t.interrupted[0] == 0);
}

TEST_CASE("GridWorld: obstacle ends the episode with -1") {
  auto academy = envsuite::make_env("GridWorld", {}, 0);
  auto out = academy->reset(0);
  auto& env = static_cast<GridWorldEnv&>(academy->environment());
  env.set_layout(5, {1, 1}, {4, 4}, {{1, 2}});
  out = academy->step(constant(out, 3.0f));  // +y
  REQUIRE(out.terminals.at("GridWorld").size() == 1);
  CHECK(out.terminals.at("GridWorld").rewards[0] == doctest::Approx(-1.01));
}

TEST_CASE("GridWorld expert follows a shortest path") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto academy = envsuite::make_env("GridWorld", {{"num_obstacles", 0.0}}, trial);
    auto out = academy->reset(trial);
    auto& env = static_cast<GridWorldEnv&>(academy->environment());
    const Cell a = env.agent_cell(), g = env.goal_cell();
    const int manhattan = std::abs(a.x - g.x) + std::abs(a.y - g.y);
    CHECK(env.shortest_path_length() == manhattan);
    int steps = 0;
    while (out.terminals.at("GridWorld").size() == 0 && steps < 50) {
      const auto act = academy->environment().expert_action(*academy, 0);
      out = academy->step(constant(out, act[0]));
      ++steps;
    }
    CHECK(steps == manhattan);
    CHECK(out.terminals.at("GridWorld").rewards[0] == doctest::Approx(0.99));
  }
}

TEST_CASE("self-play environments have no scripted expert") {
  CHECK_ERROR_CODE(envsuite::scripted_policy("Tennis"), ErrorCode::kNoScriptedExpert);
  CHECK_ERROR_CODE(envsuite::scripted_policy("StrikersVsGoalie"), ErrorCode::kNoScriptedExpert);
}

TEST_CASE("FoodCollector reports four rows per decision") {
  auto academy = envsuite::make_env("FoodCollector", {}, 0);
  auto out = academy->reset(0);
  CHECK(out.decisions.at("FoodCollector").size() == 4);
  out = academy->step(constant(out, 0.0f));
  CHECK(out.decisions.at("FoodCollector").size() == 4);
}

TEST_CASE("scripted experts beat random play") {
  struct Case {
    std::string env;
    double expert_min;
  };
  for (const Case& c : {Case{"Basic", 0.929}, Case{"GridWorld", 0.9}, Case{"Hallway", 0.85},
                        Case{"PushBlock", 4.5}}) {
    CAPTURE(c.env);
    auto a = trainer::build_env(c.env, {}, 3);
    const auto expert = trainer::run_episodes(*a, trainer::scripted_controller(c.env), "", 30, 3);
    CHECK(expert.mean >= c.expert_min);
    Rng rng(9);
    auto b = trainer::build_env(c.env, {}, 3);
    const auto random = trainer::run_episodes(*b, trainer::random_controller(rng), "", 30, 3);
    CHECK(random.mean < expert.mean);
  }
}

TEST_CASE("Hallway random baseline is negative") {
  Rng rng(1);
  auto a = trainer::build_env("Hallway", {}, 1);
  const auto r = trainer::run_episodes(*a, trainer::random_controller(rng), "", 50, 1);
  CHECK(r.mean < 0.0);
}

TEST_CASE("terminal rewards match the reward tables (random replay audit)") {
  auto audit = [](const std::string& env, auto allowed) {
    auto academy = envsuite::make_env(env, {}, 17);
    Rng rng(17);
    auto out = academy->reset(17);
    int terminals = 0;
    for (int i = 0; i < 10000; ++i) {
      ActionMap m;
      for (const auto& [name, b] : out.decisions) {
        m[name].agent_ids = b.agent_ids;
        for (std::size_t k = 0; k < b.size(); ++k) m[name].values.push_back(static_cast<float>(rng.below(3)));
      }
      out = academy->step(m);
      for (const auto& [name, t] : out.terminals) {
        for (std::size_t k = 0; k < t.size(); ++k) {
          ++terminals;
          CAPTURE(t.rewards[k]);
          CHECK(allowed(t.rewards[k], t.interrupted[k] != 0));
        }
      }
    }
    CHECK(terminals > 0);
  };
  auto near = [](double a, double b) { return std::abs(a - b) < 1e-6; };
  audit("Basic", [&](double r, bool interrupted) {
    return interrupted ? near(r, -0.01) : (near(r, 0.99) || near(r, 0.09));
  });
  audit("GridWorld", [&](double r, bool interrupted) {
    return interrupted ? near(r, -0.01) : (near(r, 0.99) || near(r, -1.01));
  });
}

TEST_CASE("environments replay identically from the same seed") {
  for (const auto& name : envsuite::environment_names()) {
    CAPTURE(name);
    auto run = [&] {
      auto academy = envsuite::make_env(name, {}, 5);
      Rng rng(5);
      std::vector<StepOutcome> trace{academy->reset(5)};
      for (int i = 0; i < 200; ++i) {
        ActionMap m;
        for (const auto& [bname, b] : trace.back().decisions) {
          const auto& spec = academy->behavior(bname).action;
          m[bname].agent_ids = b.agent_ids;
          for (std::size_t k = 0; k < b.size() * spec.width(); ++k) {
            m[bname].values.push_back(static_cast<float>(rng.below(static_cast<std::uint64_t>(
                spec.kind == ActionKind::kDiscrete ? spec.branches[0] : 1))));
          }
        }
        trace.push_back(academy->step(m));
      }
      return trace;
    };
    CHECK(run() == run());
  }
}
