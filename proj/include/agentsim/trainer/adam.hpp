#pragma once

#include <Eigen/Dense>

namespace agentsim::trainer {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(Eigen::Index size, AdamConfig config = {});

  // params -= lr * m_hat / (sqrt(v_hat) + eps)
  void step(Eigen::VectorXf& params, const Eigen::VectorXf& grad);
  void set_lr(double lr) { config_.lr = lr; }
  const AdamConfig& config() const { return config_; }
  long steps() const { return t_; }

 private:
  AdamConfig config_;
  Eigen::VectorXf m_;
  Eigen::VectorXf v_;
  long t_ = 0;
};

// Scales `grad` so its L2 norm is at most `max_norm`; returns the original norm.
double clip_grad_norm(Eigen::VectorXf& grad, double max_norm);

}  // namespace agentsim::trainer
