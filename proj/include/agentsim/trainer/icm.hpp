#pragma once

#include <Eigen/Dense>
#include <utility>

#include "agentsim/kernel/spec.hpp"
#include "agentsim/trainer/adam.hpp"
#include "agentsim/trainer/network.hpp"

namespace agentsim::trainer {

struct IcmConfig {
  bool enabled = false;
  double eta = 0.01;
  double beta = 0.2;
  int feature_dim = 32;
};

// (eta / 2) * squared forward-model error.
double intrinsic_reward(double squared_error, double eta);

template <typename T>
struct IcmNets {
  Network<T> encoder;  // obs -> phi
  Network<T> forward;  // [phi(s), one-hot a] -> phi(s') estimate
  Network<T> inverse;  // [phi(s), phi(s')] -> action logits
};

template <typename T>
struct IcmGrads {
  typename Network<T>::Vector encoder, forward, inverse;
};

template <typename T>
struct IcmLoss {
  T total = 0;
  T forward = 0;  // mean of 0.5 * ||phi_hat - phi(s')||^2
  T inverse = 0;  // mean action cross-entropy
};

// beta * forward + (1 - beta) * inverse. phi(s') is a fixed target for the
// forward model; the inverse model trains the encoder.
template <typename T>
IcmLoss<T> icm_loss(const IcmNets<T>& nets, const kernel::ActionSpec& action,
                    const typename Network<T>::Matrix& obs, const typename Network<T>::Matrix& actions,
                    const typename Network<T>::Matrix& next_obs, double beta, IcmGrads<T>* grads);

class Icm {
 public:
  Icm(int obs_size, const kernel::ActionSpec& action, IcmConfig config, Rng& rng, double lr,
      int hidden = 64);

  Eigen::VectorXf intrinsic_rewards(const Eigen::MatrixXf& obs, const Eigen::MatrixXf& actions,
                                    const Eigen::MatrixXf& next_obs) const;
  IcmLoss<float> update(const Eigen::MatrixXf& obs, const Eigen::MatrixXf& actions,
                        const Eigen::MatrixXf& next_obs);

  const IcmConfig& config() const { return config_; }
  const IcmNets<float>& nets() const { return nets_; }

 private:
  kernel::ActionSpec action_;
  IcmConfig config_;
  IcmNets<float> nets_;
  Adam enc_opt_, fwd_opt_, inv_opt_;
};

// One-hot (discrete, per branch) or raw (continuous) action encoding.
template <typename T>
typename Network<T>::Matrix encode_actions(const kernel::ActionSpec& action,
                                           const typename Network<T>::Matrix& actions);
int encoded_action_size(const kernel::ActionSpec& action);

}  // namespace agentsim::trainer
