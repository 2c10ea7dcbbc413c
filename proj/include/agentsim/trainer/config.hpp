#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agentsim/kernel/academy.hpp"
#include "agentsim/trainer/curriculum.hpp"
#include "agentsim/trainer/elo.hpp"
#include "agentsim/trainer/icm.hpp"
#include "agentsim/trainer/network.hpp"
#include "json.hpp"

namespace agentsim::trainer {

// Environment parameter assignment: a fixed value or a per-episode sampler.
struct ParamValue {
  std::optional<double> fixed;
  kernel::ParameterSampler sampler;
};
using ParamMap = std::map<std::string, ParamValue>;

ParamMap param_map_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ParamMap& params);
// Fixed values become environment parameters, samplers are installed.
void apply_params(kernel::Academy& academy, const ParamMap& params);
// Fixed values only (used for construction-time keys such as visual_size).
std::map<std::string, double> fixed_params(const ParamMap& params);

struct SelfPlayConfig {
  bool enabled = false;
  std::uint64_t snapshot_interval = 10000;
  std::size_t window = 5;
  double p_latest = 0.5;
  double initial_elo = kInitialElo;
  double k_factor = kEloK;
  // Asymmetric games: steps between switches of the learning behavior.
  std::uint64_t swap_interval = 50000;
};

struct TrainConfig {
  std::string env = "Basic";
  ParamMap env_params;
  std::string algorithm = "ppo";  // ppo | bc
  double gamma = 0.99;
  double lambda = 0.95;
  double clip_eps = 0.2;
  double lr = 3e-4;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  int horizon = 256;
  int batch_size = 1024;
  int minibatch_size = 64;
  int epochs = 3;
  std::uint64_t total_steps = 30000;
  IcmConfig icm;
  SelfPlayConfig self_play;
  LessonPlan curriculum;
  std::uint64_t seed = 0;

  // Network and evaluation settings.
  std::vector<int> hidden{64, 64};
  Activation activation = Activation::kTanh;
  double max_grad_norm = 0.5;
  int eval_episodes = 100;
  std::uint64_t eval_interval = 0;  // 0: only at the end
  // false: evaluate the sampling policy instead of argmax / mean actions.
  bool eval_deterministic = true;
  // Named parameter splits evaluated after training, e.g. train / test.
  std::map<std::string, ParamMap> eval_splits;

  // Behavioral cloning.
  std::string demo;        // demo file; empty: record scripted demos
  int demo_episodes = 200;
  std::string init_model;  // checkpoint to start from

  void validate() const;
};

TrainConfig config_from_json(const nlohmann::json& j);
TrainConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const TrainConfig& c);
// FNV-1a 64 of the canonical JSON text, as 16 hex digits.
std::string config_hash(const TrainConfig& c);

}  // namespace agentsim::trainer
