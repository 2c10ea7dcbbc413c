#include "agentsim/trainer/adam.hpp"

#include <cmath>

#include "agentsim/core/error.hpp"

namespace agentsim::trainer {

Adam::Adam(Eigen::Index size, AdamConfig config)
    : config_(config), m_(Eigen::VectorXf::Zero(size)), v_(Eigen::VectorXf::Zero(size)) {}

void Adam::step(Eigen::VectorXf& params, const Eigen::VectorXf& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "optimizer state size differs from parameters");
  }
  ++t_;
  const auto b1 = static_cast<float>(config_.beta1);
  const auto b2 = static_cast<float>(config_.beta2);
  m_ = b1 * m_ + (1.0f - b1) * grad;
  v_ = b2 * v_ + (1.0f - b2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  const auto step = static_cast<float>(config_.lr / c1);
  const auto s2 = static_cast<float>(1.0 / std::sqrt(c2));
  const auto eps = static_cast<float>(config_.eps);
  params.array() -= step * m_.array() / (v_.array().sqrt() * s2 + eps);
}

double clip_grad_norm(Eigen::VectorXf& grad, double max_norm) {
  const double norm = grad.cast<double>().norm();
  if (max_norm > 0.0 && norm > max_norm) grad *= static_cast<float>(max_norm / norm);
  return norm;
}

}  // namespace agentsim::trainer
