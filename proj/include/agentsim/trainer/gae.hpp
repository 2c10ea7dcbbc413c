#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace agentsim::trainer {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// delta_t = r_t + gamma * V_{t+1} * (1 - done_t) - V_t
// A_t     = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
// V_T is `bootstrap`. Raises LengthMismatch when the inputs differ in length.
GaeResult gae(std::span<const double> rewards, std::span<const double> values,
              std::span<const std::uint8_t> dones, double bootstrap, double gamma, double lambda);

}  // namespace agentsim::trainer
