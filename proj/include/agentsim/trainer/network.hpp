#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "agentsim/core/rng.hpp"
#include "agentsim/kernel/spec.hpp"

namespace agentsim::trainer {

enum class Activation : std::uint8_t { kTanh = 0, kRelu = 1 };

// Dense trunk with linear output heads stacked in one output vector:
// [categorical logits per branch | Gaussian means | value | linear outputs].
// Gaussian log-stds are state independent and live after the MLP weights in
// the flat parameter vector.
struct Topology {
  int input = 0;
  std::vector<int> hidden{64, 64};
  Activation activation = Activation::kTanh;
  std::vector<int> branches;
  int continuous_dim = 0;
  bool value_head = true;
  int linear_outputs = 0;

  int logits() const;
  int output_size() const;
  std::size_t mlp_param_count() const;
  std::size_t param_count() const { return mlp_param_count() + static_cast<std::size_t>(continuous_dim); }

  int logit_row(std::size_t branch) const;
  int mean_row() const { return logits(); }
  int value_row() const { return logits() + continuous_dim; }
  int linear_row() const { return value_row() + (value_head ? 1 : 0); }

  bool operator==(const Topology&) const = default;

  // Policy/value network for a behavior; all observations are concatenated.
  static Topology for_behavior(const kernel::BehaviorSpec& spec, std::vector<int> hidden = {64, 64},
                               Activation activation = Activation::kTanh);
};

template <typename T>
class Network {
 public:
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

  // Post-activation values per layer; acts[0] is the input.
  struct Cache {
    std::vector<Matrix> acts;
  };

  explicit Network(Topology topology);

  // Scaled-normal weights (1/sqrt(fan_in)), zero biases, small policy head.
  void init(Rng& rng);

  const Topology& topology() const { return topology_; }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }
  std::size_t log_std_offset() const { return topology_.mlp_param_count(); }

  // x: input x batch. Returns output_size x batch.
  Matrix forward(const Matrix& x, Cache* cache = nullptr) const;
  // Adds dL/dparams (MLP part) into `grad`; writes dL/dx when requested.
  void backward(const Cache& cache, const Matrix& dout, Vector& grad, Matrix* dx = nullptr) const;

  template <typename U>
  Network<U> cast() const {
    Network<U> out(topology_);
    out.params() = params_.template cast<U>();
    return out;
  }

 private:
  std::vector<int> dims() const;

  Topology topology_;
  Vector params_;
};

extern template class Network<float>;
extern template class Network<double>;

}  // namespace agentsim::trainer
