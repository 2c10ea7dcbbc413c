#include "agentsim/trainer/train_run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <numeric>

#include "agentsim/core/error.hpp"
#include "agentsim/protocol/metrics.hpp"
#include "agentsim/protocol/recorder.hpp"
#include "agentsim/trainer/adam.hpp"
#include "agentsim/trainer/checkpoint.hpp"
#include "agentsim/trainer/curriculum.hpp"
#include "agentsim/trainer/elo.hpp"
#include "agentsim/trainer/gae.hpp"
#include "agentsim/trainer/icm.hpp"
#include "agentsim/trainer/losses.hpp"
#include "agentsim/trainer/self_play.hpp"

namespace agentsim::trainer {

using Json = nlohmann::json;
using kernel::AgentId;

namespace {

constexpr std::uint64_t kEvalSeedOffset = 1000003;
constexpr std::size_t kRecentEpisodes = 100;

struct Step {
  Eigen::VectorXf obs;
  Eigen::VectorXf action;
  float log_prob = 0.0f;
  float value = 0.0f;
  double reward = 0.0;
};

struct Segment {
  std::vector<Step> steps;
  std::optional<Step> pending;
  double episode_return = 0.0;
  int decisions = 0;
};

struct Buffer {
  std::vector<Eigen::VectorXf> obs, actions, next_obs;
  std::vector<float> log_prob;
  std::vector<double> advantages, returns;

  std::size_t size() const { return obs.size(); }
  void clear() { *this = Buffer{}; }
};

struct Learner {
  std::string behavior;
  kernel::BehaviorSpec spec;
  std::unique_ptr<Policy> policy;
  std::unique_ptr<Adam> adam;
  std::unique_ptr<Icm> icm;

  SnapshotPool pool{1};
  double elo = kInitialElo;
  std::unique_ptr<Policy> snapshot_policy;  // loaded opponent snapshot
  std::optional<std::size_t> opponent;      // nullopt: current policy
  std::uint64_t next_snapshot = 0;

  Buffer buffer;
  std::map<AgentId, Segment> segments;
  std::deque<double> recent_returns;
  std::deque<double> recent_lengths;
  std::uint64_t steps = 0;

  const Policy& opponent_policy() const {
    return opponent && snapshot_policy ? *snapshot_policy : *policy;
  }
};

double mean_of(const std::deque<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void push_recent(std::deque<double>& q, double v) {
  q.push_back(v);
  if (q.size() > kRecentEpisodes) q.pop_front();
}

Json eval_json(const EvalResult& r) {
  return {{"mean", r.mean}, {"std", r.std}, {"episodes", r.episodes},
          {"mean_length", r.mean_length}};
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Eigen::MatrixXf stack_columns(const std::vector<Eigen::VectorXf>& cols,
                              const std::vector<std::size_t>& idx) {
  Eigen::MatrixXf m(cols.front().size(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = cols[idx[i]];
  return m;
}

class Trainer {
 public:
  Trainer(const TrainConfig& cfg, const std::filesystem::path& dir, const TrainHooks& hooks)
      : cfg_(cfg), dir_(dir), hooks_(hooks), rng_(cfg.seed) {}

  TrainResult run();

 private:
  void setup_learners(const kernel::Academy& academy);
  void load_init_model();
  void run_ppo();
  void run_bc();

  bool is_learning(const std::string& behavior) const;
  Learner* learner_for(const std::string& behavior);
  AgentId reference_agent() const;

  std::vector<float> decide(const std::string& behavior, const kernel::DecisionBatch& batch);
  void on_terminals(const std::string& behavior, const kernel::TerminalBatch& batch);
  void finalize(Learner& l, Segment& seg, double bootstrap, bool done,
                const Eigen::VectorXf& last_next_obs);
  void on_episode_end(Learner& l, AgentId agent, double episode_return, int decisions);
  void update(Learner& l);
  void select_opponents();
  void maybe_snapshot(Learner& l);
  void maybe_swap();
  void run_eval(const char* event);
  EvalResult evaluate_with(const ParamMap& params,
                           const std::map<std::string, const Policy*>& policies) const;

  std::uint64_t total_steps() const;
  void record(const Json& j);

  const TrainConfig& cfg_;
  std::filesystem::path dir_;
  TrainHooks hooks_;
  Rng rng_;
  Rng policy_rng_{0};
  Rng shuffle_rng_{0};
  Rng selfplay_rng_{0};

  std::unique_ptr<kernel::Academy> academy_;
  std::vector<Learner> learners_;
  std::size_t learning_index_ = 0;  // asymmetric self-play
  std::uint64_t next_swap_ = 0;
  std::uint64_t next_eval_ = 0;
  std::optional<Curriculum> curriculum_;
  std::vector<double> lesson_returns_;

  protocol::MetricsLog metrics_;
  protocol::MetricsLog elo_log_;
  TrainResult result_;
};

std::uint64_t Trainer::total_steps() const {
  std::uint64_t s = 0;
  for (const auto& l : learners_) s += l.steps;
  return s;
}

void Trainer::record(const Json& j) {
  metrics_.write(j);
  if (hooks_.on_record) hooks_.on_record(j);
}

void Trainer::setup_learners(const kernel::Academy& academy) {
  Rng init = rng_.split("init");
  for (const auto& spec : academy.behaviors()) {
    Learner l;
    l.behavior = spec.name;
    l.spec = spec;
    l.policy = std::make_unique<Policy>(
        Policy::create(spec, cfg_.hidden, cfg_.activation, init));
    l.adam = std::make_unique<Adam>(static_cast<Eigen::Index>(l.policy->network().params().size()),
                                    AdamConfig{.lr = cfg_.lr});
    if (cfg_.icm.enabled) {
      Rng icm_rng = init.split("icm:" + spec.name);
      l.icm = std::make_unique<Icm>(static_cast<int>(spec.observation_size()), spec.action,
                                    cfg_.icm, icm_rng, cfg_.lr);
    }
    l.pool = SnapshotPool(cfg_.self_play.window);
    l.elo = elo_quantize(cfg_.self_play.initial_elo);
    l.next_snapshot = cfg_.self_play.snapshot_interval;
    learners_.push_back(std::move(l));
  }
}

void Trainer::load_init_model() {
  if (cfg_.init_model.empty()) return;
  Learner& l = learners_.front();
  l.policy = std::make_unique<Policy>(l.spec, load_checkpoint(cfg_.init_model));
  l.adam = std::make_unique<Adam>(static_cast<Eigen::Index>(l.policy->network().params().size()),
                                  AdamConfig{.lr = cfg_.lr});
}

bool Trainer::is_learning(const std::string& behavior) const {
  if (!cfg_.self_play.enabled || learners_.size() == 1) return true;
  return learners_[learning_index_].behavior == behavior;
}

Learner* Trainer::learner_for(const std::string& behavior) {
  for (auto& l : learners_) {
    if (l.behavior == behavior) return &l;
  }
  throw Error(ErrorCode::kUnknownBehavior, behavior);
}

// The agent whose episode outcome drives ELO and opponent selection.
AgentId Trainer::reference_agent() const {
  return academy_->agents_of(learners_[learning_index_].behavior).front();
}

std::vector<float> Trainer::decide(const std::string& behavior, const kernel::DecisionBatch& batch) {
  Learner& l = *learner_for(behavior);
  const auto obs = gather_observations(l.spec, batch.observations, batch.size());
  const bool learning = is_learning(behavior);
  const bool symmetric_self_play = cfg_.self_play.enabled && learners_.size() == 1;
  const AgentId ref = symmetric_self_play ? reference_agent() : -1;

  const auto d = l.policy->act(obs, &policy_rng_);
  Eigen::MatrixXf actions = d.actions;
  std::optional<Policy::Decision> opp;

  for (std::size_t i = 0; i < batch.size(); ++i) {
    const AgentId id = batch.agent_ids[i];
    const auto col = static_cast<Eigen::Index>(i);
    const bool trains = learning && (!symmetric_self_play || id == ref);
    if (!trains) {
      if (cfg_.self_play.enabled && (l.opponent || !learning)) {
        if (!opp) opp = l.opponent_policy().act(obs, &policy_rng_);
        actions.col(col) = opp->actions.col(col);
      }
      continue;
    }
    Segment& seg = l.segments[id];
    if (seg.pending) {
      seg.pending->reward = batch.rewards[i];
      seg.steps.push_back(std::move(*seg.pending));
    }
    seg.episode_return += batch.rewards[i];
    seg.decisions += 1;
    seg.pending = Step{obs.col(col), d.actions.col(col), d.log_prob(col), d.values(col), 0.0};
    ++l.steps;
    if (seg.steps.size() >= static_cast<std::size_t>(cfg_.horizon)) {
      finalize(l, seg, seg.pending->value, false, seg.pending->obs);
    }
  }
  return l.policy->env_actions(actions);
}

void Trainer::on_terminals(const std::string& behavior, const kernel::TerminalBatch& batch) {
  Learner& l = *learner_for(behavior);
  if (batch.size() == 0) return;
  const auto obs = gather_observations(l.spec, batch.observations, batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const AgentId id = batch.agent_ids[i];
    auto it = l.segments.find(id);
    if (it == l.segments.end()) continue;
    Segment& seg = it->second;
    const auto col = static_cast<Eigen::Index>(i);
    if (seg.pending) {
      seg.pending->reward = batch.rewards[i];
      seg.steps.push_back(std::move(*seg.pending));
      seg.pending.reset();
    }
    seg.episode_return += batch.rewards[i];
    const bool interrupted = batch.interrupted[i] != 0;
    double bootstrap = 0.0;
    if (interrupted && !seg.steps.empty()) {
      bootstrap = l.policy->values(obs.col(col))(0);
    }
    finalize(l, seg, bootstrap, !interrupted, obs.col(col));
    const double ret = seg.episode_return;
    const int decisions = seg.decisions;
    seg.episode_return = 0.0;
    seg.decisions = 0;
    on_episode_end(l, id, ret, decisions);
  }
}

void Trainer::finalize(Learner& l, Segment& seg, double bootstrap, bool done,
                       const Eigen::VectorXf& last_next_obs) {
  if (seg.steps.empty()) return;
  const std::size_t n = seg.steps.size();
  std::vector<double> rewards(n), values(n);
  std::vector<std::uint8_t> dones(n, 0);
  dones.back() = done ? 1 : 0;
  std::vector<Eigen::VectorXf> next(n);
  for (std::size_t t = 0; t < n; ++t) {
    rewards[t] = seg.steps[t].reward;
    values[t] = seg.steps[t].value;
    next[t] = t + 1 < n ? seg.steps[t + 1].obs : last_next_obs;
  }
  if (l.icm) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<Eigen::VectorXf> o(n), a(n);
    for (std::size_t t = 0; t < n; ++t) {
      o[t] = seg.steps[t].obs;
      a[t] = seg.steps[t].action;
    }
    const auto ri = l.icm->intrinsic_rewards(stack_columns(o, idx), stack_columns(a, idx),
                                             stack_columns(next, idx));
    for (std::size_t t = 0; t < n; ++t) rewards[t] += ri(static_cast<Eigen::Index>(t));
  }
  const auto g = gae(rewards, values, dones, bootstrap, cfg_.gamma, cfg_.lambda);
  for (std::size_t t = 0; t < n; ++t) {
    l.buffer.obs.push_back(std::move(seg.steps[t].obs));
    l.buffer.actions.push_back(std::move(seg.steps[t].action));
    l.buffer.log_prob.push_back(seg.steps[t].log_prob);
    l.buffer.advantages.push_back(g.advantages[t]);
    l.buffer.returns.push_back(g.returns[t]);
    if (l.icm) l.buffer.next_obs.push_back(std::move(next[t]));
  }
  seg.steps.clear();
}

void Trainer::on_episode_end(Learner& l, AgentId agent, double episode_return, int decisions) {
  push_recent(l.recent_returns, episode_return);
  push_recent(l.recent_lengths, decisions);

  if (curriculum_ && &l == &learners_.front()) {
    lesson_returns_.push_back(episode_return);
    const auto& lesson = curriculum_->current();
    double measure = 0.0;
    if (lesson.measure == Measure::kProgress) {
      measure = static_cast<double>(total_steps()) / static_cast<double>(cfg_.total_steps);
    } else {
      const std::size_t window =
          std::max<std::size_t>(1, static_cast<std::size_t>(lesson.min_lesson_length));
      const std::size_t from = lesson_returns_.size() > window ? lesson_returns_.size() - window : 0;
      measure = std::accumulate(lesson_returns_.begin() + static_cast<std::ptrdiff_t>(from),
                                lesson_returns_.end(), 0.0) /
                static_cast<double>(lesson_returns_.size() - from);
    }
    if (curriculum_->advance(measure, static_cast<int>(lesson_returns_.size()))) {
      curriculum_->apply(*academy_);
      lesson_returns_.clear();
      record({{"event", "lesson"}, {"step", total_steps()}, {"lesson", curriculum_->lesson()},
              {"measure", measure}});
    }
  }

  if (!cfg_.self_play.enabled || agent != reference_agent()) return;
  // Opponent: the other behavior (asymmetric) or the same behavior's pool.
  Learner& opp = learners_.size() == 1 ? l : learners_[(learning_index_ + 1) % learners_.size()];
  double* opp_elo = nullptr;
  if (opp.opponent) {
    opp_elo = &opp.pool.at(*opp.opponent).elo;
  } else if (&opp != &l) {
    opp_elo = &opp.elo;
  } else {
    // Against the live policy the two updates cancel.
    select_opponents();
    return;
  }
  const double score = score_from_return(episode_return);
  EloRecord rec;
  rec.step = total_steps();
  rec.behavior = l.behavior;
  rec.r_a = l.elo;
  rec.r_b = *opp_elo;
  std::tie(rec.r_a_new, rec.r_b_new) =
      elo_update(rec.r_a, rec.r_b, score, cfg_.self_play.k_factor);
  rec.score = score;
  l.elo = rec.r_a_new;
  *opp_elo = rec.r_b_new;
  elo_log_.write(rec.to_json());
  result_.elo_history.push_back(rec);
  select_opponents();
}

void Trainer::select_opponents() {
  for (std::size_t i = 0; i < learners_.size(); ++i) {
    Learner& l = learners_[i];
    if (learners_.size() > 1 && i == learning_index_) {
      l.opponent.reset();
      continue;
    }
    l.opponent = select_opponent(l.pool, cfg_.self_play.p_latest, selfplay_rng_);
    if (l.opponent) {
      Network<float> net = l.policy->network();
      net.params() = Eigen::Map<const Eigen::VectorXf>(
          l.pool.at(*l.opponent).params.data(),
          static_cast<Eigen::Index>(l.pool.at(*l.opponent).params.size()));
      l.snapshot_policy = std::make_unique<Policy>(l.spec, std::move(net));
    }
  }
}

void Trainer::maybe_snapshot(Learner& l) {
  if (!cfg_.self_play.enabled) return;
  while (l.steps >= l.next_snapshot) {
    const auto& p = l.policy->network().params();
    l.pool.push({std::vector<float>(p.data(), p.data() + p.size()), l.elo, l.steps});
    l.next_snapshot += cfg_.self_play.snapshot_interval;
  }
}

void Trainer::maybe_swap() {
  if (!cfg_.self_play.enabled || learners_.size() < 2) return;
  if (total_steps() < next_swap_) return;
  next_swap_ += cfg_.self_play.swap_interval;
  Learner& old = learners_[learning_index_];
  old.segments.clear();
  old.buffer.clear();
  learning_index_ = (learning_index_ + 1) % learners_.size();
  record({{"event", "swap"}, {"step", total_steps()},
          {"behavior", learners_[learning_index_].behavior}});
}

void Trainer::update(Learner& l) {
  for (auto& [id, seg] : l.segments) {
    if (seg.pending) finalize(l, seg, seg.pending->value, false, seg.pending->obs);
  }
  Buffer& b = l.buffer;
  const std::size_t n = b.size();
  if (n == 0) return;

  double mean = 0.0;
  for (double a : b.advantages) mean += a;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double a : b.advantages) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / static_cast<double>(n)) + 1e-8;

  PpoCoefficients coef{cfg_.clip_eps, cfg_.value_coef, cfg_.entropy_coef};
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t mb = std::max<std::size_t>(1, static_cast<std::size_t>(cfg_.minibatch_size));
  PpoStats<float> last{};
  double stat_sum[4] = {0, 0, 0, 0};
  int batches = 0;
  IcmLoss<float> icm_last{};

  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng_.below(i)]);
    }
    for (std::size_t start = 0; start < n; start += mb) {
      const std::size_t end = std::min(n, start + mb);
      std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                   order.begin() + static_cast<std::ptrdiff_t>(end));
      PolicyBatch<float> pb;
      pb.obs = stack_columns(b.obs, idx);
      pb.actions = stack_columns(b.actions, idx);
      const auto m = static_cast<Eigen::Index>(idx.size());
      pb.old_log_prob.resize(m);
      pb.advantages.resize(m);
      pb.returns.resize(m);
      for (Eigen::Index k = 0; k < m; ++k) {
        const std::size_t j = idx[static_cast<std::size_t>(k)];
        pb.old_log_prob(k) = b.log_prob[j];
        pb.advantages(k) = static_cast<float>((b.advantages[j] - mean) / sd);
        pb.returns(k) = static_cast<float>(b.returns[j]);
      }
      Eigen::VectorXf grad;
      last = ppo_loss(l.policy->network(), pb, coef, &grad);
      if (!std::isfinite(last.loss) || !grad.allFinite()) {
        throw Error(ErrorCode::kNonFiniteLoss, "PPO loss diverged for '" + l.behavior + "'");
      }
      clip_grad_norm(grad, cfg_.max_grad_norm);
      l.adam->step(l.policy->network().params(), grad);
      stat_sum[0] += last.policy_loss;
      stat_sum[1] += last.value_loss;
      stat_sum[2] += last.entropy;
      stat_sum[3] += last.clip_fraction;
      ++batches;
      if (l.icm) {
        icm_last = l.icm->update(pb.obs, pb.actions, stack_columns(b.next_obs, idx));
      }
    }
  }
  b.clear();

  const std::uint64_t step = total_steps();
  Json j{{"step", step},
         {"behavior", l.behavior},
         {"mean_reward", l.recent_returns.empty() ? Json(nullptr) : Json(mean_of(l.recent_returns))},
         {"episode_len", l.recent_lengths.empty() ? Json(nullptr) : Json(mean_of(l.recent_lengths))},
         {"episodes", l.recent_returns.size()},
         {"policy_loss", stat_sum[0] / batches},
         {"value_loss", stat_sum[1] / batches},
         {"entropy", stat_sum[2] / batches},
         {"clip_fraction", stat_sum[3] / batches}};
  if (l.icm) j["icm_forward"] = icm_last.forward;
  if (cfg_.self_play.enabled) j["elo"] = l.elo;
  if (curriculum_) j["lesson"] = curriculum_->lesson();
  record(j);
  metrics_.flush();
}

EvalResult Trainer::evaluate_with(const ParamMap& params,
                                  const std::map<std::string, const Policy*>& policies) const {
  const std::uint64_t seed = cfg_.seed + kEvalSeedOffset;
  if (cfg_.eval_deterministic) {
    return evaluate(cfg_.env, params, policies, learners_.front().behavior, cfg_.eval_episodes, seed);
  }
  Rng sample = Rng(seed).split("eval");
  return evaluate(cfg_.env, params, policies, learners_.front().behavior, cfg_.eval_episodes, seed,
                  &sample);
}

void Trainer::run_eval(const char* event) {
  std::map<std::string, const Policy*> policies;
  for (const auto& l : learners_) policies[l.behavior] = l.policy.get();
  ParamMap params = cfg_.env_params;
  if (curriculum_) {
    for (const auto& [k, v] : curriculum_->current().params) params[k] = ParamValue{v, {}};
  }
  const auto r = evaluate_with(params, policies);
  Json j = eval_json(r);
  j["event"] = event;
  j["step"] = total_steps();
  j["behavior"] = learners_.front().behavior;
  record(j);
  result_.final_eval = r;
}

void Trainer::run_ppo() {
  academy_ = build_env(cfg_.env, cfg_.env_params, cfg_.seed);
  setup_learners(*academy_);
  load_init_model();
  if (!cfg_.curriculum.empty()) {
    curriculum_.emplace(cfg_.curriculum);
    curriculum_->apply(*academy_);
  }
  policy_rng_ = rng_.split("policy");
  shuffle_rng_ = rng_.split("shuffle");
  selfplay_rng_ = rng_.split("selfplay");
  next_swap_ = cfg_.self_play.swap_interval;
  next_eval_ = cfg_.eval_interval;
  if (cfg_.self_play.enabled) elo_log_.open(dir_ / "elo.jsonl");

  auto outcome = academy_->reset(cfg_.seed);
  bool stop = false;
  while (!stop && total_steps() < cfg_.total_steps) {
    for (const auto& [name, batch] : outcome.terminals) on_terminals(name, batch);
    kernel::ActionMap actions;
    for (const auto& [name, batch] : outcome.decisions) {
      auto& ab = actions[name];
      ab.agent_ids = batch.agent_ids;
      if (batch.size() > 0) ab.values = decide(name, batch);
    }
    for (auto& l : learners_) {
      maybe_snapshot(l);
      if (l.buffer.size() >= static_cast<std::size_t>(cfg_.batch_size)) {
        update(l);
        if (hooks_.should_stop && hooks_.should_stop()) stop = true;
      }
    }
    maybe_swap();
    if (cfg_.eval_interval > 0 && total_steps() >= next_eval_ && total_steps() < cfg_.total_steps) {
      run_eval("eval");
      next_eval_ += cfg_.eval_interval;
    }
    outcome = academy_->step(actions);
  }
  for (auto& l : learners_) {
    if (l.buffer.size() > 0) update(l);
  }
  run_eval("final_eval");
  if (curriculum_) result_.final_lesson = curriculum_->lesson();
  for (const auto& l : learners_) {
    if (cfg_.self_play.enabled) result_.elo[l.behavior] = l.elo;
  }
}

void Trainer::run_bc() {
  protocol::DemoFile demo;
  if (cfg_.demo.empty()) {
    demo = protocol::record_scripted(cfg_.env, cfg_.demo_episodes, cfg_.seed,
                                     fixed_params(cfg_.env_params));
  } else {
    demo = protocol::read_demo(cfg_.demo);
  }
  academy_ = build_env(cfg_.env, cfg_.env_params, cfg_.seed);
  setup_learners(*academy_);
  load_init_model();
  Learner& l = learners_.front();
  if (!(demo.spec.observations == l.spec.observations) || !(demo.spec.action == l.spec.action)) {
    throw Error(ErrorCode::kShapeMismatch, "demo spec does not match '" + l.behavior + "'");
  }

  std::vector<Eigen::VectorXf> obs, actions;
  for (const auto& rec : demo.records) {
    if (rec.done) continue;
    obs.push_back(gather_observations(l.spec, rec.observations, 1).col(0));
    actions.push_back(Eigen::Map<const Eigen::VectorXf>(rec.action.data(),
                                                        static_cast<Eigen::Index>(rec.action.size())));
  }
  if (obs.empty()) throw Error(ErrorCode::kEmptyBatch, "demo has no decision records");

  shuffle_rng_ = rng_.split("shuffle");
  const std::size_t n = obs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t mb = std::max<std::size_t>(1, static_cast<std::size_t>(cfg_.minibatch_size));
  std::uint64_t samples = 0;
  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle_rng_.below(i)]);
    double loss_sum = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < n; start += mb) {
      std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                   order.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + mb)));
      Eigen::VectorXf grad;
      const float loss = bc_loss(l.policy->network(), stack_columns(obs, idx),
                                 stack_columns(actions, idx), &grad);
      if (!std::isfinite(loss)) throw Error(ErrorCode::kNonFiniteLoss, "BC loss diverged");
      clip_grad_norm(grad, cfg_.max_grad_norm);
      l.adam->step(l.policy->network().params(), grad);
      loss_sum += loss;
      ++batches;
      samples += idx.size();
    }
    l.steps = samples;
    record({{"step", samples}, {"behavior", l.behavior}, {"epoch", epoch},
            {"bc_loss", loss_sum / batches}});
  }

  if (academy_->environment().has_expert()) {
    const auto heldout = protocol::record_scripted(cfg_.env, std::max(1, cfg_.demo_episodes / 10),
                                                   cfg_.seed + kEvalSeedOffset,
                                                   fixed_params(cfg_.env_params));
    result_.heldout_agreement = action_agreement(*l.policy, heldout);
    record({{"event", "agreement"}, {"step", samples}, {"value", *result_.heldout_agreement}});
  }
  run_eval("final_eval");
}

TrainResult Trainer::run() {
  const auto started = std::chrono::steady_clock::now();
  std::filesystem::create_directories(dir_);
  write_atomic(dir_ / "config.json", to_json(cfg_).dump(2) + "\n");
  metrics_.open(dir_ / "metrics.jsonl");

  if (cfg_.algorithm == "bc") {
    run_bc();
  } else {
    run_ppo();
  }

  for (const auto& [name, split] : cfg_.eval_splits) {
    std::map<std::string, const Policy*> policies;
    for (const auto& l : learners_) policies[l.behavior] = l.policy.get();
    ParamMap params = cfg_.env_params;
    for (const auto& [k, v] : split) params[k] = v;
    const auto r = evaluate_with(params, policies);
    result_.split_evals[name] = r;
    Json j = eval_json(r);
    j["event"] = "split_eval";
    j["split"] = name;
    j["step"] = total_steps();
    record(j);
  }

  for (const auto& l : learners_) {
    save_checkpoint(dir_ / ("model_" + l.behavior + ".agnn"), l.policy->network());
  }
  metrics_.close();
  elo_log_.close();

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  result_.run_dir = dir_;
  result_.steps = total_steps();
  Json report{{"env", cfg_.env},
              {"algorithm", cfg_.algorithm},
              {"seed", cfg_.seed},
              {"total_steps", result_.steps},
              {"final_eval", eval_json(result_.final_eval)},
              {"eval_protocol", std::string(cfg_.eval_deterministic ? "greedy" : "sampled") +
                                    " policy, " + std::to_string(cfg_.eval_episodes) +
                                    " episodes, seed " +
                                    std::to_string(cfg_.seed + kEvalSeedOffset)},
              {"wall_clock_s", wall},
              {"config_hash", config_hash(cfg_)}};
  if (!result_.split_evals.empty()) {
    Json splits = Json::object();
    for (const auto& [name, r] : result_.split_evals) splits[name] = eval_json(r);
    report["splits"] = splits;
  }
  if (!result_.elo.empty()) report["elo"] = result_.elo;
  if (curriculum_) report["final_lesson"] = result_.final_lesson;
  if (result_.heldout_agreement) report["heldout_agreement"] = *result_.heldout_agreement;
  write_atomic(dir_ / "report.json", report.dump(2) + "\n");
  result_.report = std::move(report);
  return std::move(result_);
}

}  // namespace

Json EloRecord::to_json() const {
  return {{"step", step}, {"behavior", behavior}, {"r_a", r_a},     {"r_b", r_b},
          {"r_a_new", r_a_new}, {"r_b_new", r_b_new}, {"score", score}};
}

std::filesystem::path default_run_dir(const TrainConfig& config) {
  return protocol::log_root() /
         (config.env + "_" + config.algorithm + "_s" + std::to_string(config.seed));
}

TrainResult train_run(const TrainConfig& config, const std::filesystem::path& run_dir,
                      const TrainHooks& hooks) {
  config.validate();
  Trainer t(config, run_dir, hooks);
  return t.run();
}

double action_agreement(const Policy& policy, const protocol::DemoFile& demo) {
  std::size_t total = 0, agree = 0;
  for (const auto& rec : demo.records) {
    if (rec.done) continue;
    const auto obs = gather_observations(policy.spec(), rec.observations, 1);
    const auto d = policy.act(obs, nullptr);
    const auto a = policy.env_actions(d.actions);
    bool same = true;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (policy.spec().action.kind == kernel::ActionKind::kDiscrete) {
        same = same && std::lround(a[k]) == std::lround(rec.action[k]);
      } else {
        same = same && std::abs(a[k] - rec.action[k]) < 0.1f;
      }
    }
    ++total;
    if (same) ++agree;
  }
  return total == 0 ? 0.0 : static_cast<double>(agree) / static_cast<double>(total);
}

}  // namespace agentsim::trainer
