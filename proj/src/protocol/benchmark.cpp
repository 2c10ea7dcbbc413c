#include "agentsim/protocol/benchmark.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "agentsim/envsuite/registry.hpp"
#include "agentsim/protocol/client.hpp"
#include "agentsim/protocol/server.hpp"

namespace agentsim::protocol {

Json BenchmarkResult::to_json() const {
  return Json{{"env", env},         {"obs_type", obs_type}, {"num_agents", num_agents},
              {"steps", steps},     {"mean_ms", mean_ms},   {"std_ms", std_ms}};
}

BenchmarkResult run_benchmark(const std::string& env, int steps, std::uint64_t seed,
                              const std::map<std::string, double>& params) {
  auto academy = envsuite::make_env(env, params, seed);
  BenchmarkResult result;
  result.env = env;
  result.steps = steps;
  result.num_agents = static_cast<int>(academy->agents().size());
  for (const auto& o : academy->behaviors().front().observations) {
    if (!result.obs_type.empty()) result.obs_type += "+";
    result.obs_type += kernel::describe(o);
  }

  Server server(*academy, ServerOptions{"127.0.0.1", 0, {}});
  server.bind();
  std::atomic<bool> stop{false};
  std::thread thread([&] { server.serve_one(stop); });

  std::vector<double> ms;
  try {
    auto client = Client::connect("127.0.0.1", server.port());
    Rng rng = Rng(seed).split("benchmark");
    std::map<std::string, kernel::BehaviorSpec> specs;
    for (const auto& b : client.manifest().manifest) specs[b.name] = b;
    auto outcome = client.reset(static_cast<std::int64_t>(seed));
    ms.reserve(static_cast<std::size_t>(steps));
    for (int s = 0; s < steps; ++s) {
      kernel::ActionMap actions;
      for (const auto& [name, batch] : outcome.decisions) {
        auto& ab = actions[name];
        ab.agent_ids = batch.agent_ids;
        const auto& spec = specs.at(name).action;
        for (std::size_t i = 0; i < batch.size(); ++i) {
          if (spec.kind == kernel::ActionKind::kDiscrete) {
            for (int b : spec.branches) ab.values.push_back(static_cast<float>(rng.below(b)));
          } else {
            for (int d = 0; d < spec.continuous_dim; ++d) {
              ab.values.push_back(static_cast<float>(rng.uniform(-1.0, 1.0)));
            }
          }
        }
      }
      const auto t0 = std::chrono::steady_clock::now();
      outcome = client.step(actions);
      const auto t1 = std::chrono::steady_clock::now();
      ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    client.close();
  } catch (...) {
    stop = true;
    thread.join();
    throw;
  }
  stop = true;
  thread.join();

  double sum = 0.0;
  for (double v : ms) sum += v;
  result.mean_ms = ms.empty() ? 0.0 : sum / static_cast<double>(ms.size());
  double sq = 0.0;
  for (double v : ms) sq += (v - result.mean_ms) * (v - result.mean_ms);
  result.std_ms = ms.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(ms.size()));
  return result;
}

}  // namespace agentsim::protocol
