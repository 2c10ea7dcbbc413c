#include "agentsim/trainer/rollout.hpp"

#include <cmath>

#include "agentsim/core/error.hpp"
#include "agentsim/envsuite/registry.hpp"

namespace agentsim::trainer {

Controller policy_controller(std::map<std::string, const Policy*> policies, Rng* rng) {
  return [policies = std::move(policies), rng](const kernel::Academy&, const std::string& behavior,
                                               const kernel::DecisionBatch& batch) {
    auto it = policies.find(behavior);
    if (it == policies.end() || !it->second) {
      throw Error(ErrorCode::kInvalidConfig, "no policy for behavior '" + behavior + "'");
    }
    const Policy& p = *it->second;
    const auto obs = gather_observations(p.spec(), batch.observations, batch.size());
    return p.env_actions(p.act(obs, rng).actions);
  };
}

Controller random_controller(Rng& rng) {
  return [&rng](const kernel::Academy& academy, const std::string& behavior,
                const kernel::DecisionBatch& batch) {
    const auto& spec = academy.behavior(behavior).action;
    std::vector<float> out;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (spec.kind == kernel::ActionKind::kDiscrete) {
        for (int b : spec.branches) out.push_back(static_cast<float>(rng.below(static_cast<std::uint64_t>(b))));
      } else {
        for (int d = 0; d < spec.continuous_dim; ++d) out.push_back(static_cast<float>(rng.uniform(-1.0, 1.0)));
      }
    }
    return out;
  };
}

Controller scripted_controller(const std::string& env) {
  auto expert = envsuite::scripted_policy(env);
  return [expert](const kernel::Academy& academy, const std::string&,
                  const kernel::DecisionBatch& batch) {
    std::vector<float> out;
    for (auto id : batch.agent_ids) {
      auto a = expert(academy, id);
      out.insert(out.end(), a.begin(), a.end());
    }
    return out;
  };
}

EvalResult run_episodes(kernel::Academy& academy, const Controller& controller,
                        const std::string& behavior, int episodes, std::uint64_t seed) {
  const std::string target = behavior.empty() ? academy.behaviors().front().name : behavior;
  EvalResult r;
  double length_sum = 0.0;
  academy.set_episode_listener([&](const kernel::EpisodeSummary& s) {
    if (s.behavior_name != target || r.episodes >= episodes) return;
    r.returns.push_back(s.episode_return);
    length_sum += s.decisions;
    ++r.episodes;
  });
  auto outcome = academy.reset(seed);
  while (r.episodes < episodes) {
    kernel::ActionMap actions;
    for (const auto& [name, batch] : outcome.decisions) {
      auto& ab = actions[name];
      ab.agent_ids = batch.agent_ids;
      if (batch.size() > 0) ab.values = controller(academy, name, batch);
    }
    outcome = academy.step(actions);
  }
  academy.set_episode_listener({});
  double sum = 0.0;
  for (double v : r.returns) sum += v;
  r.mean = sum / r.episodes;
  double sq = 0.0;
  for (double v : r.returns) sq += (v - r.mean) * (v - r.mean);
  r.std = std::sqrt(sq / r.episodes);
  r.mean_length = length_sum / r.episodes;
  return r;
}

std::unique_ptr<kernel::Academy> build_env(const std::string& env, const ParamMap& params,
                                           std::uint64_t seed) {
  auto academy = envsuite::make_env(env, fixed_params(params), seed);
  apply_params(*academy, params);
  return academy;
}

EvalResult evaluate(const std::string& env, const ParamMap& params,
                    const std::map<std::string, const Policy*>& policies,
                    const std::string& behavior, int episodes, std::uint64_t seed,
                    Rng* sample_rng) {
  auto academy = build_env(env, params, seed);
  return run_episodes(*academy, policy_controller(policies, sample_rng), behavior, episodes, seed);
}

}  // namespace agentsim::trainer
