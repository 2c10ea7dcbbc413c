#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "agentsim/protocol/metrics.hpp"

namespace agentsim::protocol {

struct BenchmarkResult {
  std::string env;
  std::string obs_type;
  int num_agents = 0;
  int steps = 0;
  double mean_ms = 0.0;
  double std_ms = 0.0;

  Json to_json() const;
};

// Serves `env` on a loopback port and times `steps` random-action
// exchange_step round trips from a client.
BenchmarkResult run_benchmark(const std::string& env, int steps, std::uint64_t seed,
                              const std::map<std::string, double>& params = {});

}  // namespace agentsim::protocol
