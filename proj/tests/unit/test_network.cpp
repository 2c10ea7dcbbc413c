#include <doctest.h>

#include "../common/gradcheck.hpp"
#include "agentsim/trainer/checkpoint.hpp"
#include "agentsim/trainer/policy.hpp"
#include "helpers.hpp"

using namespace agentsim;
using namespace agentsim::trainer;
using gradcheck::MatrixD;
using gradcheck::VectorD;

namespace {

Topology linear_topology(int in, int out) {
  Topology t;
  t.input = in;
  t.hidden = {};
  t.value_head = false;
  t.linear_outputs = out;
  return t;
}

}  // namespace

TEST_CASE("one-layer linear net: x = 3 gives dL/dw = 3") {
  // L = (w x + b - y)^2 with w = 1, b = 0, y = 2.5: dL/dw = 2 (3 - 2.5) 3.
  Network<double> net(linear_topology(1, 1));
  net.params() << 1.0, 0.0;
  const MatrixD x = MatrixD::Constant(1, 1, 3.0);
  const MatrixD y = MatrixD::Constant(1, 1, 2.5);
  VectorD g;
  CHECK(linear_mse(net, x, y, &g) == doctest::Approx(0.25));
  CHECK(g[0] == doctest::Approx(3.0));
  CHECK(g[1] == doctest::Approx(1.0));
}

TEST_CASE("all-zero params with zero target: loss 0, gradient 0") {
  Topology t = linear_topology(4, 2);
  t.hidden = {8};
  Network<float> net(t);
  net.params().setZero();
  Eigen::MatrixXf x = Eigen::MatrixXf::Random(4, 5);
  Eigen::VectorXf g;
  CHECK(linear_mse(net, x, Eigen::MatrixXf::Zero(2, 5), &g) == 0.0f);
  CHECK(g.isZero());
}

TEST_CASE("parameter layout and shapes") {
  const kernel::BehaviorSpec spec{"S", {kernel::ObservationSpec::vector(3), kernel::ObservationSpec::vector(2, 2)},
                                  kernel::ActionSpec::discrete({3, 2})};
  const Topology t = Topology::for_behavior(spec, {4});
  CHECK(t.input == 7);
  CHECK(t.logits() == 5);
  CHECK(t.output_size() == 6);
  CHECK(t.logit_row(1) == 3);
  CHECK(t.param_count() == 7 * 4 + 4 + 4 * 6 + 6);
  Network<float> net(t);
  CHECK(net.forward(Eigen::MatrixXf::Zero(7, 3)).rows() == 6);
  CHECK_ERROR_CODE(net.forward(Eigen::MatrixXf::Zero(6, 3)), ErrorCode::kShapeMismatch);
}

TEST_CASE("categorical heads are normalized") {
  Rng rng(1);
  const kernel::BehaviorSpec spec{"S", {kernel::ObservationSpec::vector(4)}, kernel::ActionSpec::discrete({3, 5})};
  Network<double> net = gradcheck::random_net(Topology::for_behavior(spec), rng);
  const MatrixD obs = gradcheck::random_matrix(4, 10, rng, -2, 2);
  const MatrixD out = net.forward(obs);
  VectorD total = VectorD::Zero(10);
  for (int a0 = 0; a0 < 3; ++a0) {
    for (int a1 = 0; a1 < 5; ++a1) {
      MatrixD act(2, 10);
      act.row(0).setConstant(a0);
      act.row(1).setConstant(a1);
      total += action_stats(net, out, act).log_prob.array().exp().matrix();
    }
  }
  for (Eigen::Index i = 0; i < 10; ++i) CHECK(total[i] == doctest::Approx(1.0).epsilon(1e-9));
  MatrixD act = gradcheck::random_actions(net.topology(), 10, rng);
  const auto stats = action_stats(net, out, act);
  CHECK((stats.entropy.array() <= std::log(3.0) + std::log(5.0) + 1e-9).all());
}

TEST_CASE("finite-difference gradients: PPO loss on every suite topology") {
  Rng rng(42);
  for (const auto& nt : gradcheck::suite_topologies()) {
    CAPTURE(nt.name);
    const auto r = gradcheck::check_ppo(nt.topology, 16, rng);
    CHECK(r.max_error < 1e-4);
  }
}

TEST_CASE("finite-difference gradients: continuous and multi-branch heads") {
  Rng rng(7);
  const kernel::BehaviorSpec cont{"C", {kernel::ObservationSpec::vector(5)}, kernel::ActionSpec::continuous(3)};
  const kernel::BehaviorSpec multi{"M", {kernel::ObservationSpec::vector(5)}, kernel::ActionSpec::discrete({2, 4})};
  for (const auto& spec : {cont, multi}) {
    for (auto act : {Activation::kTanh, Activation::kRelu}) {
      const Topology t = Topology::for_behavior(spec, {16, 8}, act);
      CHECK(gradcheck::check_ppo(t, 64, rng).max_error < 1e-4);
      CHECK(gradcheck::check_bc(t, 64, rng).max_error < 1e-4);
    }
  }
  CHECK(gradcheck::check_linear(linear_topology(6, 3), 20, rng).max_error < 1e-4);
}

TEST_CASE("finite-difference gradients: ICM") {
  Rng rng(3);
  const kernel::ActionSpec action = kernel::ActionSpec::discrete({5});
  Icm icm(6, action, {.enabled = true, .eta = 0.01, .beta = 0.2, .feature_dim = 4}, rng, 1e-3, 8);
  gradcheck::IcmNetsD nets{icm.nets().encoder.cast<double>(), icm.nets().forward.cast<double>(),
                           icm.nets().inverse.cast<double>()};
  for (auto* n : {&nets.encoder, &nets.forward, &nets.inverse}) {
    for (Eigen::Index i = 0; i < n->params().size(); ++i) n->params()[i] += 0.05 * rng.normal();
  }
  const MatrixD obs = gradcheck::random_matrix(6, 5, rng, -1, 1);
  const MatrixD next = gradcheck::random_matrix(6, 5, rng, -1, 1);
  MatrixD actions(1, 5);
  for (int i = 0; i < 5; ++i) actions(0, i) = static_cast<double>(rng.below(5));
  const auto r = gradcheck::check_icm(nets, action, obs, actions, next, 0.2, 40, rng);
  CHECK(r.max_error < 1e-4);
}

TEST_CASE("losses reject empty batches") {
  Network<double> net(linear_topology(2, 1));
  CHECK_ERROR_CODE(linear_mse(net, MatrixD(2, 0), MatrixD(1, 0), nullptr), ErrorCode::kEmptyBatch);
}

TEST_CASE("checkpoint roundtrip") {
  Rng rng(5);
  const kernel::BehaviorSpec spec{"S", {kernel::ObservationSpec::vector(4)}, kernel::ActionSpec::continuous(2)};
  Network<float> net(Topology::for_behavior(spec, {8}, Activation::kRelu));
  net.init(rng);
  const auto bytes = encode_checkpoint(net);
  const Network<float> back = decode_checkpoint(bytes);
  CHECK(back.topology() == net.topology());
  CHECK(back.params() == net.params());

  auto dir = testing::scratch_dir("ckpt");
  save_checkpoint(dir / "m.agnn", net);
  CHECK(load_checkpoint(dir / "m.agnn").params() == net.params());

  auto bad = bytes;
  bad[0] = 'X';
  CHECK_ERROR_CODE(decode_checkpoint(bad), ErrorCode::kBadMagic);
  auto cut = bytes;
  cut.resize(cut.size() - 1);
  CHECK_ERROR_CODE(decode_checkpoint(cut), ErrorCode::kMalformedBody);
}

TEST_CASE("greedy policy picks the argmax, sampling follows the probabilities") {
  const kernel::BehaviorSpec spec{"S", {kernel::ObservationSpec::vector(1)}, kernel::ActionSpec::discrete({3})};
  Topology t = Topology::for_behavior(spec, {});
  Network<float> net(t);
  net.params().setZero();
  // Bias of logit 2 raised: weights (1 x 4) then biases.
  net.params()[4 + 2] = std::log(4.0f);
  Policy p(spec, net);
  Eigen::MatrixXf obs = Eigen::MatrixXf::Zero(1, 6000);
  CHECK(p.act(obs.leftCols(1), nullptr).actions(0, 0) == 2.0f);
  Rng rng(9);
  const auto d = p.act(obs, &rng);
  int twos = 0;
  for (Eigen::Index i = 0; i < d.actions.cols(); ++i) twos += d.actions(0, i) == 2.0f ? 1 : 0;
  CHECK(twos / 6000.0 == doctest::Approx(4.0 / 6.0).epsilon(0.03));
  CHECK(d.log_prob[0] == doctest::Approx(d.actions(0, 0) == 2.0f ? std::log(4.0 / 6.0) : std::log(1.0 / 6.0)));
}
