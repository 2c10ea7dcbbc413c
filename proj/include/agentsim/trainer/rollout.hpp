#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "agentsim/kernel/academy.hpp"
#include "agentsim/trainer/config.hpp"
#include "agentsim/trainer/policy.hpp"

namespace agentsim::trainer {

// Chooses action rows (row-major, one per agent) for a decision batch.
using Controller = std::function<std::vector<float>(
    const kernel::Academy&, const std::string& behavior, const kernel::DecisionBatch&)>;

Controller policy_controller(std::map<std::string, const Policy*> policies, Rng* rng = nullptr);
Controller random_controller(Rng& rng);
Controller scripted_controller(const std::string& env);

struct EvalResult {
  double mean = 0.0;
  double std = 0.0;
  int episodes = 0;
  double mean_length = 0.0;  // decisions per episode
  std::vector<double> returns;
};

// Resets `academy` with `seed` and plays until `episodes` episodes of agents
// under `behavior` have ended (empty behavior: the first one).
EvalResult run_episodes(kernel::Academy& academy, const Controller& controller,
                        const std::string& behavior, int episodes, std::uint64_t seed);

std::unique_ptr<kernel::Academy> build_env(const std::string& env, const ParamMap& params,
                                           std::uint64_t seed);
// Greedy unless `sample_rng` is given.
EvalResult evaluate(const std::string& env, const ParamMap& params,
                    const std::map<std::string, const Policy*>& policies,
                    const std::string& behavior, int episodes, std::uint64_t seed,
                    Rng* sample_rng = nullptr);

}  // namespace agentsim::trainer
