#pragma once

#include "agentsim/trainer/network.hpp"

namespace agentsim::trainer {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

// min(r*A, clip(r, 1-eps, 1+eps)*A).
double ppo_clip_term(double ratio, double advantage, double clip_eps);

template <typename T>
struct PolicyBatch {
  typename Network<T>::Matrix obs;      // input x n
  typename Network<T>::Matrix actions;  // action width x n
  typename Network<T>::Vector old_log_prob;
  typename Network<T>::Vector advantages;
  typename Network<T>::Vector returns;

  Eigen::Index size() const { return obs.cols(); }
};

// Log-probabilities and entropies of `actions` under head outputs `out`.
template <typename T>
struct ActionStats {
  typename Network<T>::Vector log_prob;
  typename Network<T>::Vector entropy;
};

template <typename T>
ActionStats<T> action_stats(const Network<T>& net, const typename Network<T>::Matrix& out,
                            const typename Network<T>::Matrix& actions);

// Back-propagates sum_i (w_logp[i] * logp_i + w_ent[i] * H_i) into `dout`
// (head gradient, added) and the log-std tail of `grad`.
template <typename T>
void action_stats_backward(const Network<T>& net, const typename Network<T>::Matrix& out,
                           const typename Network<T>::Matrix& actions,
                           const typename Network<T>::Vector& w_logp,
                           const typename Network<T>::Vector& w_ent,
                           typename Network<T>::Matrix& dout, typename Network<T>::Vector& grad);

struct PpoCoefficients {
  double clip_eps = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
};

template <typename T>
struct PpoStats {
  T loss = 0;
  T policy_loss = 0;
  T value_loss = 0;
  T entropy = 0;
  T clip_fraction = 0;
};

// Total loss = -mean(clip term) + value_coef * mean((V - R)^2)
//              - entropy_coef * mean(H).
// Writes the exact gradient to `grad` when given.
template <typename T>
PpoStats<T> ppo_loss(const Network<T>& net, const PolicyBatch<T>& batch, const PpoCoefficients& c,
                     typename Network<T>::Vector* grad);

// Mean negative log-likelihood of demonstrated actions.
template <typename T>
T bc_loss(const Network<T>& net, const typename Network<T>::Matrix& obs,
          const typename Network<T>::Matrix& actions, typename Network<T>::Vector* grad);

// Mean squared error of the linear output block against `target`; used by
// the zero-target gradient example and the ICM forward model.
template <typename T>
T linear_mse(const Network<T>& net, const typename Network<T>::Matrix& obs,
             const typename Network<T>::Matrix& target, typename Network<T>::Vector* grad);

}  // namespace agentsim::trainer
