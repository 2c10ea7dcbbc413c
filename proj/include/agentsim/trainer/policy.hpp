#pragma once

#include <Eigen/Dense>
#include <vector>

#include "agentsim/core/rng.hpp"
#include "agentsim/kernel/spec.hpp"
#include "agentsim/trainer/network.hpp"

namespace agentsim::trainer {

// Stacks the per-spec observation blocks of `rows` agents into an
// input x rows matrix (specs concatenated in order).
Eigen::MatrixXf gather_observations(const kernel::BehaviorSpec& spec,
                                    const std::vector<std::vector<float>>& observations,
                                    std::size_t rows);

class Policy {
 public:
  Policy(kernel::BehaviorSpec spec, Network<float> net);
  static Policy create(const kernel::BehaviorSpec& spec, const std::vector<int>& hidden,
                       Activation activation, Rng& rng);

  struct Decision {
    Eigen::MatrixXf actions;  // width x n, as sampled (unclipped)
    Eigen::VectorXf log_prob;
    Eigen::VectorXf values;
  };

  // Samples actions when `rng` is given; otherwise acts greedily (argmax,
  // lowest index on ties; Gaussian mean).
  Decision act(const Eigen::MatrixXf& obs, Rng* rng) const;
  Eigen::VectorXf values(const Eigen::MatrixXf& obs) const;
  // Row-major action rows for the kernel; continuous values clipped to [-1, 1].
  std::vector<float> env_actions(const Eigen::MatrixXf& actions) const;

  const kernel::BehaviorSpec& spec() const { return spec_; }
  Network<float>& network() { return net_; }
  const Network<float>& network() const { return net_; }

 private:
  kernel::BehaviorSpec spec_;
  Network<float> net_;
};

}  // namespace agentsim::trainer
