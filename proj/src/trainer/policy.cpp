#include "agentsim/trainer/policy.hpp"

#include <algorithm>
#include <cmath>

#include "agentsim/core/error.hpp"
#include "agentsim/trainer/losses.hpp"

namespace agentsim::trainer {

Eigen::MatrixXf gather_observations(const kernel::BehaviorSpec& spec,
                                    const std::vector<std::vector<float>>& observations,
                                    std::size_t rows) {
  const auto n = static_cast<Eigen::Index>(rows);
  Eigen::MatrixXf x(static_cast<Eigen::Index>(spec.observation_size()), n);
  Eigen::Index row = 0;
  for (std::size_t k = 0; k < spec.observations.size(); ++k) {
    const auto size = static_cast<Eigen::Index>(spec.observations[k].size());
    if (observations.at(k).size() != static_cast<std::size_t>(size * n)) {
      throw Error(ErrorCode::kShapeMismatch, "observation block size differs from spec");
    }
    x.middleRows(row, size) = Eigen::Map<const Eigen::MatrixXf>(observations[k].data(), size, n);
    row += size;
  }
  return x;
}

Policy::Policy(kernel::BehaviorSpec spec, Network<float> net)
    : spec_(std::move(spec)), net_(std::move(net)) {
  const Topology expected = Topology::for_behavior(spec_, net_.topology().hidden,
                                                   net_.topology().activation);
  if (!(expected == net_.topology())) {
    throw Error(ErrorCode::kShapeMismatch,
                "network topology does not fit behavior '" + spec_.name + "'");
  }
}

Policy Policy::create(const kernel::BehaviorSpec& spec, const std::vector<int>& hidden,
                      Activation activation, Rng& rng) {
  Network<float> net(Topology::for_behavior(spec, hidden, activation));
  net.init(rng);
  return Policy(spec, std::move(net));
}

Policy::Decision Policy::act(const Eigen::MatrixXf& obs, Rng* rng) const {
  const Topology& t = net_.topology();
  const Eigen::MatrixXf out = net_.forward(obs);
  const Eigen::Index n = obs.cols();
  Decision d;
  d.actions.resize(static_cast<Eigen::Index>(spec_.action.width()), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t b = 0; b < t.branches.size(); ++b) {
      auto z = out.col(i).segment(t.logit_row(b), t.branches[b]);
      int pick = 0;
      if (rng) {
        const float m = z.maxCoeff();
        const Eigen::ArrayXf e = (z.array() - m).exp();
        const double u = rng->uniform() * static_cast<double>(e.sum());
        double acc = 0.0;
        pick = t.branches[b] - 1;
        for (int k = 0; k < t.branches[b]; ++k) {
          acc += static_cast<double>(e[k]);
          if (u < acc) {
            pick = k;
            break;
          }
        }
      } else {
        for (int k = 1; k < t.branches[b]; ++k) {
          if (z[k] > z[pick]) pick = k;
        }
      }
      d.actions(static_cast<Eigen::Index>(b), i) = static_cast<float>(pick);
    }
    for (int j = 0; j < t.continuous_dim; ++j) {
      float a = out(t.mean_row() + j, i);
      if (rng) {
        const float ls = std::clamp(net_.params()[static_cast<Eigen::Index>(net_.log_std_offset()) + j],
                                    static_cast<float>(kLogStdMin), static_cast<float>(kLogStdMax));
        a += std::exp(ls) * static_cast<float>(rng->normal());
      }
      d.actions(j, i) = a;
    }
  }
  d.log_prob = action_stats(net_, out, d.actions).log_prob;
  d.values = t.value_head ? Eigen::VectorXf(out.row(t.value_row()).transpose())
                          : Eigen::VectorXf::Zero(n);
  return d;
}

Eigen::VectorXf Policy::values(const Eigen::MatrixXf& obs) const {
  const Eigen::MatrixXf out = net_.forward(obs);
  return out.row(net_.topology().value_row()).transpose();
}

std::vector<float> Policy::env_actions(const Eigen::MatrixXf& actions) const {
  std::vector<float> flat(actions.data(), actions.data() + actions.size());
  if (spec_.action.kind == kernel::ActionKind::kContinuous) {
    for (auto& v : flat) v = std::clamp(v, -1.0f, 1.0f);
  }
  return flat;
}

}  // namespace agentsim::trainer
