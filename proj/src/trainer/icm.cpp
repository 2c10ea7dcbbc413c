#include "agentsim/trainer/icm.hpp"

#include <numeric>

#include "agentsim/core/error.hpp"
#include "agentsim/trainer/losses.hpp"

namespace agentsim::trainer {

double intrinsic_reward(double squared_error, double eta) { return 0.5 * eta * squared_error; }

int encoded_action_size(const kernel::ActionSpec& action) {
  if (action.kind == kernel::ActionKind::kDiscrete) {
    return std::accumulate(action.branches.begin(), action.branches.end(), 0);
  }
  return action.continuous_dim;
}

template <typename T>
typename Network<T>::Matrix encode_actions(const kernel::ActionSpec& action,
                                           const typename Network<T>::Matrix& actions) {
  using Matrix = typename Network<T>::Matrix;
  if (action.kind == kernel::ActionKind::kContinuous) return actions;
  Matrix out = Matrix::Zero(encoded_action_size(action), actions.cols());
  for (Eigen::Index i = 0; i < actions.cols(); ++i) {
    int row = 0;
    for (std::size_t b = 0; b < action.branches.size(); ++b) {
      out(row + static_cast<int>(actions(static_cast<Eigen::Index>(b), i)), i) = T(1);
      row += action.branches[b];
    }
  }
  return out;
}

namespace {

template <typename T>
Topology inverse_topology(const kernel::ActionSpec& action, int feature_dim, int hidden) {
  Topology t;
  t.input = 2 * feature_dim;
  t.hidden = {hidden};
  t.value_head = false;
  if (action.kind == kernel::ActionKind::kDiscrete) {
    t.branches = action.branches;
  } else {
    t.linear_outputs = action.continuous_dim;
  }
  return t;
}

Topology feature_topology(int input, int outputs, int hidden) {
  Topology t;
  t.input = input;
  t.hidden = {hidden};
  t.value_head = false;
  t.linear_outputs = outputs;
  return t;
}

}  // namespace

template <typename T>
IcmLoss<T> icm_loss(const IcmNets<T>& nets, const kernel::ActionSpec& action,
                    const typename Network<T>::Matrix& obs, const typename Network<T>::Matrix& actions,
                    const typename Network<T>::Matrix& next_obs, double beta, IcmGrads<T>* grads) {
  using Matrix = typename Network<T>::Matrix;
  using Vector = typename Network<T>::Vector;
  const Eigen::Index n = obs.cols();
  if (n == 0) throw Error(ErrorCode::kEmptyBatch, "ICM loss over an empty batch");
  const int f = nets.encoder.topology().linear_outputs;
  const T inv_n = T(1) / static_cast<T>(n);

  typename Network<T>::Cache c_s, c_next, c_fwd, c_inv;
  const Matrix phi = nets.encoder.forward(obs, grads ? &c_s : nullptr);
  const Matrix phi_next = nets.encoder.forward(next_obs, grads ? &c_next : nullptr);

  Matrix fwd_in(f + encoded_action_size(action), n);
  fwd_in.topRows(f) = phi;
  fwd_in.bottomRows(fwd_in.rows() - f) = encode_actions<T>(action, actions);
  const Matrix fwd_out = nets.forward.forward(fwd_in, grads ? &c_fwd : nullptr);
  const Matrix err = fwd_out - phi_next;

  Matrix inv_in(2 * f, n);
  inv_in.topRows(f) = phi;
  inv_in.bottomRows(f) = phi_next;
  const Matrix inv_out = nets.inverse.forward(inv_in, grads ? &c_inv : nullptr);

  IcmLoss<T> loss;
  loss.forward = T(0.5) * err.squaredNorm() * inv_n;
  const bool discrete = action.kind == kernel::ActionKind::kDiscrete;
  Matrix inv_err;
  if (discrete) {
    loss.inverse = -action_stats(nets.inverse, inv_out, actions).log_prob.mean();
  } else {
    inv_err = inv_out - actions;
    loss.inverse = inv_err.squaredNorm() * inv_n;
  }
  loss.total = T(beta) * loss.forward + T(1 - beta) * loss.inverse;

  if (grads) {
    grads->encoder.setZero(static_cast<Eigen::Index>(nets.encoder.topology().param_count()));
    grads->forward.setZero(static_cast<Eigen::Index>(nets.forward.topology().param_count()));
    grads->inverse.setZero(static_cast<Eigen::Index>(nets.inverse.topology().param_count()));

    Matrix d_fwd_in;
    nets.forward.backward(c_fwd, (T(beta) * inv_n) * err, grads->forward, &d_fwd_in);

    Matrix d_inv_out = Matrix::Zero(inv_out.rows(), n);
    if (discrete) {
      const Vector w = Vector::Constant(n, -T(1 - beta) * inv_n);
      action_stats_backward(nets.inverse, inv_out, actions, w, Vector::Zero(n), d_inv_out,
                            grads->inverse);
    } else {
      d_inv_out = (T(2 * (1 - beta)) * inv_n) * inv_err;
    }
    Matrix d_inv_in;
    nets.inverse.backward(c_inv, d_inv_out, grads->inverse, &d_inv_in);

    const Matrix d_phi = d_fwd_in.topRows(f) + d_inv_in.topRows(f);
    const Matrix d_phi_next = d_inv_in.bottomRows(f);
    nets.encoder.backward(c_s, d_phi, grads->encoder);
    nets.encoder.backward(c_next, d_phi_next, grads->encoder);
  }
  return loss;
}

template typename Network<float>::Matrix encode_actions<float>(const kernel::ActionSpec&,
                                                               const Network<float>::Matrix&);
template typename Network<double>::Matrix encode_actions<double>(const kernel::ActionSpec&,
                                                                 const Network<double>::Matrix&);
template IcmLoss<float> icm_loss(const IcmNets<float>&, const kernel::ActionSpec&,
                                 const Network<float>::Matrix&, const Network<float>::Matrix&,
                                 const Network<float>::Matrix&, double, IcmGrads<float>*);
template IcmLoss<double> icm_loss(const IcmNets<double>&, const kernel::ActionSpec&,
                                  const Network<double>::Matrix&, const Network<double>::Matrix&,
                                  const Network<double>::Matrix&, double, IcmGrads<double>*);

Icm::Icm(int obs_size, const kernel::ActionSpec& action, IcmConfig config, Rng& rng, double lr,
         int hidden)
    : action_(action),
      config_(config),
      nets_{Network<float>(feature_topology(obs_size, config.feature_dim, hidden)),
            Network<float>(feature_topology(config.feature_dim + encoded_action_size(action),
                                            config.feature_dim, hidden)),
            Network<float>(inverse_topology<float>(action, config.feature_dim, hidden))},
      enc_opt_(nets_.encoder.params().size(), {lr}),
      fwd_opt_(nets_.forward.params().size(), {lr}),
      inv_opt_(nets_.inverse.params().size(), {lr}) {
  nets_.encoder.init(rng);
  nets_.forward.init(rng);
  nets_.inverse.init(rng);
}

Eigen::VectorXf Icm::intrinsic_rewards(const Eigen::MatrixXf& obs, const Eigen::MatrixXf& actions,
                                       const Eigen::MatrixXf& next_obs) const {
  const int f = config_.feature_dim;
  const Eigen::MatrixXf phi = nets_.encoder.forward(obs);
  const Eigen::MatrixXf phi_next = nets_.encoder.forward(next_obs);
  Eigen::MatrixXf fwd_in(f + encoded_action_size(action_), obs.cols());
  fwd_in.topRows(f) = phi;
  fwd_in.bottomRows(fwd_in.rows() - f) = encode_actions<float>(action_, actions);
  const Eigen::MatrixXf err = nets_.forward.forward(fwd_in) - phi_next;
  Eigen::VectorXf r(obs.cols());
  for (Eigen::Index i = 0; i < obs.cols(); ++i) {
    r[i] = static_cast<float>(intrinsic_reward(err.col(i).squaredNorm(), config_.eta));
  }
  return r;
}

IcmLoss<float> Icm::update(const Eigen::MatrixXf& obs, const Eigen::MatrixXf& actions,
                           const Eigen::MatrixXf& next_obs) {
  IcmGrads<float> g;
  const auto loss = icm_loss(nets_, action_, obs, actions, next_obs, config_.beta, &g);
  enc_opt_.step(nets_.encoder.params(), g.encoder);
  fwd_opt_.step(nets_.forward.params(), g.forward);
  inv_opt_.step(nets_.inverse.params(), g.inverse);
  return loss;
}

}  // namespace agentsim::trainer
