#include <doctest.h>

#include <fstream>
#include <sstream>

#include "agentsim/protocol/recorder.hpp"
#include "agentsim/trainer/checkpoint.hpp"
#include "agentsim/trainer/train_run.hpp"
#include "helpers.hpp"

using namespace agentsim;
using namespace agentsim::trainer;
using Json = nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TrainConfig small_basic(std::uint64_t steps) {
  TrainConfig c;
  c.env = "Basic";
  c.seed = 3;
  c.total_steps = steps;
  c.horizon = 32;
  c.batch_size = 256;
  c.minibatch_size = 64;
  c.lr = 1e-3;
  c.hidden = {16, 16};
  c.eval_episodes = 10;
  c.eval_interval = 1000;
  return c;
}

}  // namespace

TEST_CASE("two runs with one config write identical metrics logs") {
  const auto dir = testing::scratch_dir("determinism");
  const auto cfg = small_basic(2000);
  const auto a = train_run(cfg, dir / "a");
  const auto b = train_run(cfg, dir / "b");
  const auto la = slurp(dir / "a" / "metrics.jsonl");
  CHECK(!la.empty());
  CHECK(la == slurp(dir / "b" / "metrics.jsonl"));
  CHECK(a.final_eval.mean == b.final_eval.mean);
  CHECK(a.steps >= 2000);
  for (const char* f : {"config.json", "report.json", "model_Basic.agnn"}) {
    CHECK(std::filesystem::exists(dir / "a" / f));
  }
  const auto report = Json::parse(slurp(dir / "a" / "report.json"));
  CHECK(report["env"] == "Basic");
  CHECK(report["config_hash"] == config_hash(cfg));
  CHECK(report.contains("eval_protocol"));
  CHECK(load_checkpoint(dir / "a" / "model_Basic.agnn").topology().input == 1);
}

TEST_CASE("metrics records carry the update fields") {
  const auto dir = testing::scratch_dir("records");
  std::vector<Json> records;
  train_run(small_basic(600), dir, {.on_record = [&](const Json& j) { records.push_back(j); }});
  bool update = false;
  for (const auto& j : records) {
    if (j.contains("policy_loss")) {
      update = true;
      for (const char* k : {"step", "behavior", "mean_reward", "episode_len", "value_loss", "entropy"}) {
        CHECK(j.contains(k));
      }
    }
  }
  CHECK(update);
}

TEST_CASE("should_stop ends a run early") {
  const auto dir = testing::scratch_dir("early");
  int polls = 0;
  const auto r = train_run(small_basic(100000), dir, {.should_stop = [&] { return ++polls > 1; }});
  CHECK(r.steps < 100000);
}

TEST_CASE("behavioral cloning on scripted Basic demos") {
  const auto dir = testing::scratch_dir("bc");
  TrainConfig c = small_basic(0);
  c.algorithm = "bc";
  c.demo_episodes = 50;
  c.epochs = 20;
  const auto r = train_run(c, dir);
  REQUIRE(r.heldout_agreement.has_value());
  CHECK(*r.heldout_agreement >= 0.95);
  CHECK(r.final_eval.mean >= 0.85);

  const auto demo = protocol::record_scripted("Basic", 5, 77);
  const auto net = load_checkpoint(dir / "model_Basic.agnn");
  const Policy p(demo.spec, net);
  CHECK(action_agreement(p, demo) >= 0.95);
}

TEST_CASE("self-play smoke run keeps ELO zero-sum") {
  const auto dir = testing::scratch_dir("selfplay");
  TrainConfig c;
  c.env = "Tennis";
  c.seed = 2;
  c.total_steps = 3000;
  c.horizon = 64;
  c.batch_size = 512;
  c.minibatch_size = 128;
  c.hidden = {16};
  c.eval_episodes = 4;
  c.self_play.enabled = true;
  c.self_play.snapshot_interval = 500;
  c.self_play.window = 3;
  const auto r = train_run(c, dir);
  CHECK(!r.elo_history.empty());
  for (const auto& e : r.elo_history) {
    CHECK(e.r_a_new + e.r_b_new == e.r_a + e.r_b);
  }
  CHECK(std::filesystem::exists(dir / "elo.jsonl"));
  CHECK(r.elo.count("Tennis") == 1);
}

TEST_CASE("curriculum run and split evaluation") {
  const auto dir = testing::scratch_dir("curriculum");
  TrainConfig c = small_basic(1500);
  c.env = "GridWorld";
  c.env_params = param_map_from_json(Json{{"visual_size", 10}});
  c.hidden = {16};
  c.curriculum = lesson_plan_from_json(Json::parse(R"([
      {"params": {"grid_size": 5}, "completion": {"measure": "progress", "threshold": 0.5}},
      {"params": {"grid_size": 7}}])"));
  c.eval_splits["train"] = param_map_from_json(Json{{"grid_size", 5}});
  c.eval_splits["test"] = param_map_from_json(Json{{"grid_size", 6}});
  const auto r = train_run(c, dir);
  CHECK(r.final_lesson == 1);
  CHECK(r.split_evals.size() == 2);
  CHECK(r.split_evals.at("test").episodes == c.eval_episodes);
}

TEST_CASE("invalid configs are rejected before any work") {
  TrainConfig c = small_basic(100);
  c.env = "Walker";
  CHECK_ERROR_CODE(train_run(c, testing::scratch_dir("bad_env")), ErrorCode::kUnknownEnvironment);
  c = small_basic(100);
  c.algorithm = "bc";
  c.env = "Tennis";
  CHECK_ERROR_CODE(train_run(c, testing::scratch_dir("bad_bc")), ErrorCode::kNoScriptedExpert);
}
