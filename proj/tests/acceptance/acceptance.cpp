// Acceptance runner: one PASS/FAIL line per criterion. Always exits 0.
// Optional arguments select criteria by name.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "../common/gradcheck.hpp"
#include "../common/wirefuzz.hpp"
#include "agentsim/protocol/benchmark.hpp"
#include "agentsim/trainer/curriculum.hpp"
#include "agentsim/trainer/gae.hpp"
#include "agentsim/trainer/rollout.hpp"
#include "agentsim/trainer/train_run.hpp"

using namespace agentsim;
using namespace agentsim::trainer;
using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path run_root() {
  static const fs::path root = [] {
    auto p = fs::temp_directory_path() / "agentsim_acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Timed {
  TrainResult result;
  double seconds;
};

Timed timed_run(const TrainConfig& cfg, const std::string& name, const TrainHooks& hooks = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  auto r = train_run(cfg, run_root() / name, hooks);
  return {std::move(r), seconds_since(t0)};
}

Outcome ppo_threshold(const std::string& config, const std::string& name, double threshold,
                      double max_seconds) {
  const TrainConfig cfg = load_config(config);
  const auto [r, secs] = timed_run(cfg, name);
  const bool ok = r.final_eval.mean >= threshold && r.steps <= cfg.total_steps + cfg.batch_size &&
                  secs < max_seconds && r.final_eval.episodes == 100;
  return {ok, fmt("mean %.3f over %d episodes (need >= %.2f), %llu steps, %.1f s (limit %.0f s)",
                  r.final_eval.mean, r.final_eval.episodes, threshold,
                  static_cast<unsigned long long>(r.steps), secs, max_seconds)};
}

Outcome basic_ppo() { return ppo_threshold("configs/basic_ppo.json", "basic", 0.90, 120); }
Outcome gridworld_ppo() { return ppo_threshold("configs/gridworld_ppo.json", "gridworld", 0.85, 900); }
Outcome pushblock_ppo() { return ppo_threshold("configs/pushblock_ppo.json", "pushblock", 3.5, 2400); }

Outcome hallway() {
  const TrainConfig cfg = load_config("configs/hallway_ppo.json");
  Rng rng(cfg.seed);
  auto env = build_env(cfg.env, cfg.env_params, cfg.seed);
  const int stack = env->behaviors().front().observations.front().stack;
  const auto random = run_episodes(*env, random_controller(rng), "", 100, cfg.seed);
  const auto [r, secs] = timed_run(cfg, "hallway");
  const bool ok = random.mean < 0.0 && r.final_eval.mean >= 0.3 && r.steps <= cfg.total_steps + cfg.batch_size;
  return {ok, fmt("trained %.3f (need >= 0.30), random %.3f (need < 0), stack %d, icm %s, %.1f s",
                  r.final_eval.mean, random.mean, stack, cfg.icm.enabled ? "on" : "off", secs)};
}

Outcome tennis() {
  const TrainConfig cfg = load_config("configs/tennis_selfplay.json");
  const auto [r, secs] = timed_run(cfg, "tennis");
  const double elo = r.elo.count("Tennis") ? r.elo.at("Tennis") : cfg.self_play.initial_elo;
  std::size_t violations = 0;
  for (const auto& e : r.elo_history) {
    if (e.r_a_new + e.r_b_new != e.r_a + e.r_b) ++violations;
  }
  const bool ok = elo > 1250.0 && violations == 0 && !r.elo_history.empty() && r.steps >= 500000;
  return {ok, fmt("ELO %.1f (need > 1250) after %llu steps, %zu updates, %zu zero-sum violations, %.1f s",
                  elo, static_cast<unsigned long long>(r.steps), r.elo_history.size(), violations, secs)};
}

Outcome behavioral_cloning() {
  TrainConfig cfg;
  cfg.env = "Basic";
  cfg.algorithm = "bc";
  cfg.seed = 1;
  cfg.demo_episodes = 200;
  cfg.epochs = 20;
  cfg.hidden = {32, 32};
  cfg.eval_episodes = 100;
  const auto [r, secs] = timed_run(cfg, "bc");
  const double agreement = r.heldout_agreement.value_or(0.0);
  const bool ok = r.heldout_agreement && agreement >= 0.95 && r.final_eval.mean >= 0.85;
  return {ok, fmt("held-out agreement %.3f (need >= 0.95), eval %.3f (need >= 0.85), %.1f s", agreement,
                  r.final_eval.mean, secs)};
}

Outcome gradient_suite() {
  Rng rng(20240601);
  double worst = 0.0;
  std::string worst_name;
  int checked = 0, topologies = 0;
  for (const auto& nt : gradcheck::suite_topologies()) {
    ++topologies;
    for (int net = 0; net < 10; ++net) {
      const auto res = gradcheck::check_ppo(nt.topology, 64, rng);
      checked += res.coordinates;
      if (res.max_error > worst) {
        worst = res.max_error;
        worst_name = nt.name;
      }
    }
  }
  return {worst < 1e-4, fmt("max relative error %.2e (need < 1e-4) at %s; %d coordinates, %d topologies x 10 nets",
                            worst, worst_name.c_str(), checked, topologies)};
}

std::vector<double> brute_force_gae(const std::vector<double>& r, const std::vector<double>& v,
                                    const std::vector<std::uint8_t>& done, double bootstrap, double gamma,
                                    double lambda) {
  std::vector<double> out(r.size());
  for (std::size_t t = 0; t < r.size(); ++t) {
    double a = 0.0, w = 1.0;
    for (std::size_t k = t; k < r.size(); ++k) {
      const double next_v = k + 1 < r.size() ? v[k + 1] : bootstrap;
      a += w * (r[k] + gamma * next_v * (done[k] ? 0.0 : 1.0) - v[k]);
      if (done[k]) break;
      w *= gamma * lambda;
    }
    out[t] = a;
  }
  return out;
}

Outcome gae_oracle() {
  Rng rng(1234);
  double worst = 0.0, worst_mc = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(rng.below(64) + 1);
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
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(g.advantages[i] - oracle[i]));

    // lambda = 1 on a terminated episode: advantage is the discounted return minus V.
    std::fill(d.begin(), d.end(), 0);
    d[n - 1] = 1;
    const auto mc = gae(r, v, d, boot, gamma, 1.0);
    double ret = 0.0;
    for (std::size_t k = n; k-- > 0;) {
      ret = r[k] + gamma * ret;
      worst_mc = std::max(worst_mc, std::abs(mc.advantages[k] - (ret - v[k])));
    }
  }
  return {worst < 1e-5 && worst_mc < 1e-5,
          fmt("1000 sequences: max |GAE - brute force| %.2e, max |lambda=1 - (G - V)| %.2e (need < 1e-5)", worst,
              worst_mc)};
}

Outcome protocol_suite() {
  using namespace agentsim::protocol;
  Rng rng(777);
  int fuzz_fail = 0;
  for (int i = 0; i < 10000; ++i) {
    const Message m = wirefuzz::random_message(rng);
    const Bytes frame = encode_message(m);
    std::size_t consumed = 0;
    if (!(decode_message(frame, &consumed) == m) || consumed != frame.size()) ++fuzz_fail;
  }
  const bool golden = hex(encode_message(Ping{})) == "01 00 00 00 00" &&
                      hex(encode_message(Hello{1, 0})) == "07 00 00 00 01 01 00 00 00 00 00" &&
                      hex(encode_message(ResetRequest{42})) == "09 00 00 00 03 2a 00 00 00 00 00 00 00" &&
                      hex(encode_message(ErrorMessage{5, "x"})) == "06 00 00 00 07 05 00 01 00 78";
  std::ostringstream bench;
  double basic_mean = 1e9;
  for (const auto& env : {"Basic", "GridWorld", "FoodCollector", "Tennis"}) {
    const auto b = run_benchmark(env, 1000, 1);
    bench << fmt(" %s %.3f+-%.3f ms;", env, b.mean_ms, b.std_ms);
    if (std::string(env) == "Basic") basic_mean = b.mean_ms;
  }
  return {fuzz_fail == 0 && golden && basic_mean < 5.0,
          fmt("fuzz 10000 messages, %d mismatches; golden bytes %s; 1000-step benchmark:", fuzz_fail,
              golden ? "match" : "DIFFER") +
              bench.str()};
}

Outcome determinism() {
  TrainConfig cfg = load_config("configs/basic_ppo.json");
  cfg.eval_interval = 5000;
  train_run(cfg, run_root() / "det_a");
  train_run(cfg, run_root() / "det_b");
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const auto a = slurp(run_root() / "det_a" / "metrics.jsonl");
  const auto b = slurp(run_root() / "det_b" / "metrics.jsonl");
  return {!a.empty() && a == b, fmt("metrics logs %zu and %zu bytes, %s", a.size(), b.size(),
                                    a == b ? "byte-identical" : "DIFFERENT")};
}

Outcome curriculum() {
  const auto plan = lesson_plan_from_json(Json::parse(R"({"lessons": [
      {"params": {"grid_size": 5}, "completion": {"measure": "mean_reward", "threshold": 0.8, "min_lesson_length": 100}},
      {"params": {"grid_size": 7}, "completion": {"measure": "mean_reward", "threshold": 0.7, "min_lesson_length": 100}},
      {"params": {"grid_size": 9}}]})"));

  // Rule check: below the threshold or the minimum length never advances,
  // reaching both always does.
  Curriculum c(plan);
  bool exact = !c.advance(0.8 - 1e-9, 1000) && !c.advance(1.0, 99) && c.advance(0.8, 100) && c.lesson() == 1 &&
               !c.advance(0.7 - 1e-9, 100) && c.advance(0.7, 100) && c.lesson() == 2 && !c.advance(1.0, 10000);

  TrainConfig cfg = load_config("configs/gridworld_ppo.json");
  cfg.total_steps = 600000;
  cfg.eval_interval = 0;
  cfg.curriculum = plan;
  cfg.eval_splits["train"] = param_map_from_json(Json{{"grid_size", 5}});
  cfg.eval_splits["test"] = param_map_from_json(Json{{"grid_size", 7}});
  std::vector<Json> lessons;
  const auto [r, secs] = timed_run(cfg, "curriculum", {.on_record = [&](const Json& j) {
                                     if (j.value("event", "") == "lesson") lessons.push_back(j);
                                   }});
  bool measured = lessons.size() == 2;
  for (std::size_t i = 0; i < lessons.size(); ++i) {
    measured = measured && lessons[i]["lesson"] == i + 1 &&
               lessons[i]["measure"].get<double>() >= plan.lessons[i].threshold;
  }
  const bool splits = r.split_evals.size() == 2 && r.split_evals.at("train").episodes == cfg.eval_episodes &&
                      r.split_evals.at("test").episodes == cfg.eval_episodes;
  std::ostringstream steps;
  for (const auto& j : lessons) steps << " " << j["step"].get<std::uint64_t>();
  return {exact && measured && splits && r.final_lesson == 2,
          fmt("threshold rule %s; run reached lesson %zu (grid %g) with advances at steps%s; splits train %.3f test %.3f; %.1f s",
              exact ? "exact" : "WRONG", r.final_lesson, plan.lessons[r.final_lesson].params.at("grid_size"),
              steps.str().c_str(), splits ? r.split_evals.at("train").mean : NAN,
              splits ? r.split_evals.at("test").mean : NAN, secs)};
}

struct Criterion {
  const char* name;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"basic", "Basic/PPO", basic_ppo},
      {"gridworld", "GridWorld(5x5)/PPO visual", gridworld_ppo},
      {"pushblock", "PushBlock/PPO", pushblock_ppo},
      {"hallway", "Hallway/PPO+stack+ICM", hallway},
      {"tennis", "Tennis self-play", tennis},
      {"bc", "Behavioral cloning", behavioral_cloning},
      {"gradients", "Gradient suite", gradient_suite},
      {"gae", "GAE oracle", gae_oracle},
      {"protocol", "Protocol", protocol_suite},
      {"determinism", "Determinism", determinism},
      {"curriculum", "Curriculum", curriculum},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.name)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.title << ": " << o.detail << std::endl;
  }
  return 0;
}
