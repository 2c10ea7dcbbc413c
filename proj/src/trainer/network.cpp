#include "agentsim/trainer/network.hpp"

#include <cmath>
#include <numeric>

#include "agentsim/core/error.hpp"

namespace agentsim::trainer {

int Topology::logits() const { return std::accumulate(branches.begin(), branches.end(), 0); }

int Topology::output_size() const {
  return logits() + continuous_dim + (value_head ? 1 : 0) + linear_outputs;
}

std::size_t Topology::mlp_param_count() const {
  std::size_t n = 0;
  int in = input;
  for (int h : hidden) {
    n += static_cast<std::size_t>(h) * static_cast<std::size_t>(in + 1);
    in = h;
  }
  return n + static_cast<std::size_t>(output_size()) * static_cast<std::size_t>(in + 1);
}

int Topology::logit_row(std::size_t branch) const {
  return std::accumulate(branches.begin(), branches.begin() + static_cast<std::ptrdiff_t>(branch), 0);
}

Topology Topology::for_behavior(const kernel::BehaviorSpec& spec, std::vector<int> hidden,
                                Activation activation) {
  Topology t;
  t.input = static_cast<int>(spec.observation_size());
  t.hidden = std::move(hidden);
  t.activation = activation;
  if (spec.action.kind == kernel::ActionKind::kDiscrete) {
    t.branches = spec.action.branches;
  } else {
    t.continuous_dim = spec.action.continuous_dim;
  }
  return t;
}

template <typename T>
Network<T>::Network(Topology topology)
    : topology_(std::move(topology)),
      params_(Vector::Zero(static_cast<Eigen::Index>(topology_.param_count()))) {
  if (topology_.input <= 0 || topology_.output_size() <= 0) {
    throw Error(ErrorCode::kShapeMismatch, "network needs positive input and output sizes");
  }
}

template <typename T>
std::vector<int> Network<T>::dims() const {
  std::vector<int> d{topology_.input};
  d.insert(d.end(), topology_.hidden.begin(), topology_.hidden.end());
  d.push_back(topology_.output_size());
  return d;
}

template <typename T>
void Network<T>::init(Rng& rng) {
  const auto d = dims();
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < d.size(); ++l) {
    const int in = d[l];
    const int out = d[l + 1];
    const bool last = l + 2 == d.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (int c = 0; c < in; ++c) {
      for (int r = 0; r < out; ++r) {
        double s = scale;
        // Policy outputs start near uniform / zero mean.
        if (last && r < topology_.logits() + topology_.continuous_dim) s *= 0.01;
        params_[static_cast<Eigen::Index>(off + static_cast<std::size_t>(c * out + r))] =
            static_cast<T>(s * rng.normal());
      }
    }
    off += static_cast<std::size_t>(in) * static_cast<std::size_t>(out);
    for (int r = 0; r < out; ++r) params_[static_cast<Eigen::Index>(off++)] = T(0);
  }
  for (int i = 0; i < topology_.continuous_dim; ++i) params_[static_cast<Eigen::Index>(off++)] = T(0);
}

template <typename T>
typename Network<T>::Matrix Network<T>::forward(const Matrix& x, Cache* cache) const {
  if (x.rows() != topology_.input) {
    throw Error(ErrorCode::kShapeMismatch, "network input has " + std::to_string(x.rows()) +
                                               " rows, topology expects " +
                                               std::to_string(topology_.input));
  }
  const auto d = dims();
  if (cache) {
    cache->acts.resize(d.size() - 1);
    cache->acts[0] = x;
  }
  Matrix h = x;
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < d.size(); ++l) {
    const int in = d[l];
    const int out = d[l + 1];
    Eigen::Map<const Matrix> w(params_.data() + off, out, in);
    off += static_cast<std::size_t>(in) * static_cast<std::size_t>(out);
    Eigen::Map<const Vector> b(params_.data() + off, out);
    off += static_cast<std::size_t>(out);
    Matrix z = w * h;
    z.colwise() += b;
    if (l + 2 < d.size()) {
      if (topology_.activation == Activation::kTanh) {
        z = z.array().tanh().matrix();
      } else {
        z = z.array().max(T(0)).matrix();
      }
      if (cache) cache->acts[l + 1] = z;
    }
    h = std::move(z);
  }
  return h;
}

template <typename T>
void Network<T>::backward(const Cache& cache, const Matrix& dout, Vector& grad, Matrix* dx) const {
  const auto d = dims();
  if (dout.rows() != topology_.output_size() || dout.cols() != cache.acts[0].cols()) {
    throw Error(ErrorCode::kShapeMismatch, "output gradient shape differs from forward pass");
  }
  if (grad.size() != static_cast<Eigen::Index>(topology_.param_count())) {
    throw Error(ErrorCode::kShapeMismatch, "gradient vector has the wrong length");
  }
  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < d.size(); ++l) {
    offsets.push_back(off);
    off += static_cast<std::size_t>(d[l + 1]) * static_cast<std::size_t>(d[l] + 1);
  }
  Matrix delta = dout;
  for (std::size_t l = d.size() - 1; l-- > 0;) {
    const int in = d[l];
    const int out = d[l + 1];
    const Matrix& a = cache.acts[l];
    Eigen::Map<const Matrix> w(params_.data() + offsets[l], out, in);
    Eigen::Map<Matrix> gw(grad.data() + offsets[l], out, in);
    Eigen::Map<Vector> gb(grad.data() + offsets[l] + static_cast<std::size_t>(in * out), out);
    gw.noalias() += delta * a.transpose();
    gb += delta.rowwise().sum();
    if (l == 0 && !dx) break;
    Matrix back = w.transpose() * delta;
    if (l == 0) {
      *dx = std::move(back);
      break;
    }
    if (topology_.activation == Activation::kTanh) {
      back.array() *= (T(1) - a.array().square());
    } else {
      back.array() *= (a.array() > T(0)).template cast<T>();
    }
    delta = std::move(back);
  }
}

template class Network<float>;
template class Network<double>;

}  // namespace agentsim::trainer
