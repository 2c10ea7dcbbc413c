#include "agentsim/trainer/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "agentsim/core/error.hpp"

namespace agentsim::trainer {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

template <typename T>
T clamped_log_std(const Network<T>& net, int j) {
  const T raw = net.params()[static_cast<Eigen::Index>(net.log_std_offset()) + j];
  return std::clamp(raw, T(kLogStdMin), T(kLogStdMax));
}

void check_batch(Eigen::Index n) {
  if (n == 0) throw Error(ErrorCode::kEmptyBatch, "loss over an empty batch");
}

}  // namespace

double ppo_clip_term(double ratio, double advantage, double clip_eps) {
  const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  return std::min(ratio * advantage, clipped * advantage);
}

template <typename T>
ActionStats<T> action_stats(const Network<T>& net, const typename Network<T>::Matrix& out,
                            const typename Network<T>::Matrix& actions) {
  const Topology& t = net.topology();
  const Eigen::Index n = out.cols();
  ActionStats<T> s;
  s.log_prob = Network<T>::Vector::Zero(n);
  s.entropy = Network<T>::Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t b = 0; b < t.branches.size(); ++b) {
      const int row = t.logit_row(b);
      const int k = t.branches[b];
      auto z = out.col(i).segment(row, k);
      const T m = z.maxCoeff();
      const T lse = m + std::log((z.array() - m).exp().sum());
      const int a = static_cast<int>(actions(static_cast<Eigen::Index>(b), i));
      if (a < 0 || a >= k) throw Error(ErrorCode::kShapeMismatch, "action index out of range");
      s.log_prob[i] += z[a] - lse;
      const auto p = (z.array() - lse).exp();
      s.entropy[i] += lse - (p * z.array()).sum();
    }
    for (int j = 0; j < t.continuous_dim; ++j) {
      const T ls = clamped_log_std(net, j);
      const T u = (actions(j, i) - out(t.mean_row() + j, i)) / std::exp(ls);
      s.log_prob[i] += T(-0.5) * u * u - ls - T(kHalfLog2Pi);
      s.entropy[i] += ls + T(0.5) + T(kHalfLog2Pi);
    }
  }
  return s;
}

template <typename T>
void action_stats_backward(const Network<T>& net, const typename Network<T>::Matrix& out,
                           const typename Network<T>::Matrix& actions,
                           const typename Network<T>::Vector& w_logp,
                           const typename Network<T>::Vector& w_ent,
                           typename Network<T>::Matrix& dout, typename Network<T>::Vector& grad) {
  const Topology& t = net.topology();
  const Eigen::Index n = out.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t b = 0; b < t.branches.size(); ++b) {
      const int row = t.logit_row(b);
      const int k = t.branches[b];
      auto z = out.col(i).segment(row, k);
      const T m = z.maxCoeff();
      const T lse = m + std::log((z.array() - m).exp().sum());
      const auto logp = (z.array() - lse).eval();
      const auto p = logp.exp().eval();
      const T h = -(p * logp).sum();
      const int a = static_cast<int>(actions(static_cast<Eigen::Index>(b), i));
      auto d = dout.col(i).segment(row, k);
      d.array() += -w_logp[i] * p - w_ent[i] * p * (logp + h);
      d[a] += w_logp[i];
    }
    for (int j = 0; j < t.continuous_dim; ++j) {
      const Eigen::Index slot = static_cast<Eigen::Index>(net.log_std_offset()) + j;
      const T raw = net.params()[slot];
      const T ls = std::clamp(raw, T(kLogStdMin), T(kLogStdMax));
      const T sigma = std::exp(ls);
      const T diff = actions(j, i) - out(t.mean_row() + j, i);
      dout(t.mean_row() + j, i) += w_logp[i] * diff / (sigma * sigma);
      if (raw > T(kLogStdMin) && raw < T(kLogStdMax)) {
        const T u = diff / sigma;
        grad[slot] += w_logp[i] * (u * u - T(1)) + w_ent[i];
      }
    }
  }
}

template <typename T>
PpoStats<T> ppo_loss(const Network<T>& net, const PolicyBatch<T>& batch, const PpoCoefficients& c,
                     typename Network<T>::Vector* grad) {
  using Matrix = typename Network<T>::Matrix;
  using Vector = typename Network<T>::Vector;
  const Topology& t = net.topology();
  if (!t.value_head) throw Error(ErrorCode::kShapeMismatch, "PPO needs a value head");
  const Eigen::Index n = batch.size();
  check_batch(n);
  if (batch.actions.cols() != n || batch.old_log_prob.size() != n ||
      batch.advantages.size() != n || batch.returns.size() != n) {
    throw Error(ErrorCode::kShapeMismatch, "PPO batch columns disagree");
  }
  typename Network<T>::Cache cache;
  const Matrix out = net.forward(batch.obs, grad ? &cache : nullptr);
  const ActionStats<T> s = action_stats(net, out, batch.actions);
  const T inv_n = T(1) / static_cast<T>(n);
  const T lo = T(1 - c.clip_eps);
  const T hi = T(1 + c.clip_eps);

  PpoStats<T> stats;
  Vector w_logp = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const T r = std::exp(s.log_prob[i] - batch.old_log_prob[i]);
    const T adv = batch.advantages[i];
    const T unclipped = r * adv;
    const T clipped = std::clamp(r, lo, hi) * adv;
    stats.policy_loss -= std::min(unclipped, clipped) * inv_n;
    if (unclipped <= clipped) {
      w_logp[i] = -unclipped * inv_n;
    }
    if (r < lo || r > hi) stats.clip_fraction += inv_n;
  }
  const auto v = out.row(t.value_row());
  const Vector err = v.transpose() - batch.returns;
  stats.value_loss = err.squaredNorm() * inv_n;
  stats.entropy = s.entropy.mean();
  stats.loss = stats.policy_loss + T(c.value_coef) * stats.value_loss - T(c.entropy_coef) * stats.entropy;

  if (grad) {
    grad->setZero(static_cast<Eigen::Index>(t.param_count()));
    Matrix dout = Matrix::Zero(out.rows(), n);
    const Vector w_ent = Vector::Constant(n, T(-c.entropy_coef) * inv_n);
    action_stats_backward(net, out, batch.actions, w_logp, w_ent, dout, *grad);
    dout.row(t.value_row()) = (T(2 * c.value_coef) * inv_n) * err.transpose();
    net.backward(cache, dout, *grad);
  }
  return stats;
}

template <typename T>
T bc_loss(const Network<T>& net, const typename Network<T>::Matrix& obs,
          const typename Network<T>::Matrix& actions, typename Network<T>::Vector* grad) {
  using Matrix = typename Network<T>::Matrix;
  using Vector = typename Network<T>::Vector;
  const Eigen::Index n = obs.cols();
  check_batch(n);
  if (actions.cols() != n) throw Error(ErrorCode::kShapeMismatch, "one action per observation");
  typename Network<T>::Cache cache;
  const Matrix out = net.forward(obs, grad ? &cache : nullptr);
  const ActionStats<T> s = action_stats(net, out, actions);
  const T loss = -s.log_prob.mean();
  if (grad) {
    grad->setZero(static_cast<Eigen::Index>(net.topology().param_count()));
    Matrix dout = Matrix::Zero(out.rows(), n);
    const Vector w_logp = Vector::Constant(n, T(-1) / static_cast<T>(n));
    action_stats_backward(net, out, actions, w_logp, Vector::Zero(n), dout, *grad);
    net.backward(cache, dout, *grad);
  }
  return loss;
}

template <typename T>
T linear_mse(const Network<T>& net, const typename Network<T>::Matrix& obs,
             const typename Network<T>::Matrix& target, typename Network<T>::Vector* grad) {
  using Matrix = typename Network<T>::Matrix;
  const Topology& t = net.topology();
  const Eigen::Index n = obs.cols();
  check_batch(n);
  if (target.rows() != t.linear_outputs || target.cols() != n) {
    throw Error(ErrorCode::kShapeMismatch, "target shape differs from linear outputs");
  }
  typename Network<T>::Cache cache;
  const Matrix out = net.forward(obs, grad ? &cache : nullptr);
  const Matrix err = out.middleRows(t.linear_row(), t.linear_outputs) - target;
  const T loss = err.squaredNorm() / static_cast<T>(n);
  if (grad) {
    grad->setZero(static_cast<Eigen::Index>(t.param_count()));
    Matrix dout = Matrix::Zero(out.rows(), n);
    dout.middleRows(t.linear_row(), t.linear_outputs) = (T(2) / static_cast<T>(n)) * err;
    net.backward(cache, dout, *grad);
  }
  return loss;
}

#define AGENTSIM_INSTANTIATE(T)                                                                 \
  template ActionStats<T> action_stats(const Network<T>&, const Network<T>::Matrix&,            \
                                       const Network<T>::Matrix&);                              \
  template void action_stats_backward(const Network<T>&, const Network<T>::Matrix&,             \
                                      const Network<T>::Matrix&, const Network<T>::Vector&,     \
                                      const Network<T>::Vector&, Network<T>::Matrix&,           \
                                      Network<T>::Vector&);                                     \
  template PpoStats<T> ppo_loss(const Network<T>&, const PolicyBatch<T>&,                       \
                                const PpoCoefficients&, Network<T>::Vector*);                   \
  template T bc_loss(const Network<T>&, const Network<T>::Matrix&, const Network<T>::Matrix&,   \
                     Network<T>::Vector*);                                                      \
  template T linear_mse(const Network<T>&, const Network<T>::Matrix&,                           \
                        const Network<T>::Matrix&, Network<T>::Vector*);

AGENTSIM_INSTANTIATE(float)
AGENTSIM_INSTANTIATE(double)

}  // namespace agentsim::trainer
