#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agentsim/protocol/demo.hpp"
#include "agentsim/trainer/config.hpp"
#include "agentsim/trainer/rollout.hpp"
#include "json.hpp"

namespace agentsim::trainer {

struct EloRecord {
  std::uint64_t step = 0;
  std::string behavior;
  double r_a = 0.0, r_b = 0.0;          // learner, opponent before
  double r_a_new = 0.0, r_b_new = 0.0;  // after
  double score = 0.0;

  nlohmann::json to_json() const;
};

struct TrainHooks {
  // Called with every metrics record as it is written.
  std::function<void(const nlohmann::json&)> on_record;
  // Polled between updates; returning true ends the run early (still
  // evaluated and saved).
  std::function<bool()> should_stop;
};

struct TrainResult {
  std::filesystem::path run_dir;
  std::uint64_t steps = 0;
  EvalResult final_eval;
  std::map<std::string, EvalResult> split_evals;
  std::map<std::string, double> elo;  // per learning behavior (self-play)
  std::vector<EloRecord> elo_history;
  std::size_t final_lesson = 0;
  std::optional<double> heldout_agreement;  // BC only
  nlohmann::json report;
};

// <log root>/<env>_<algorithm>_s<seed>
std::filesystem::path default_run_dir(const TrainConfig& config);

// Runs PPO or BC as configured and writes into `run_dir`: config.json,
// metrics.jsonl, elo.jsonl (self-play), model_<behavior>.agnn, report.json.
TrainResult train_run(const TrainConfig& config, const std::filesystem::path& run_dir,
                      const TrainHooks& hooks = {});

// Fraction of decision records whose argmax action equals the recorded one.
double action_agreement(const Policy& policy, const protocol::DemoFile& demo);

}  // namespace agentsim::trainer
