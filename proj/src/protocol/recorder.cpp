#include "agentsim/protocol/recorder.hpp"

#include "agentsim/core/error.hpp"
#include "agentsim/envsuite/registry.hpp"

namespace agentsim::protocol {

namespace {

template <typename Batch>
std::optional<std::size_t> row_of(const Batch& batch, kernel::AgentId agent) {
  for (std::size_t i = 0; i < batch.agent_ids.size(); ++i) {
    if (batch.agent_ids[i] == agent) return i;
  }
  return std::nullopt;
}

template <typename Batch>
std::vector<std::vector<float>> rows(const Batch& batch, const kernel::BehaviorSpec& spec,
                                     std::size_t row) {
  std::vector<std::vector<float>> out;
  for (std::size_t k = 0; k < spec.observations.size(); ++k) {
    const std::size_t n = spec.observations[k].size();
    const auto& flat = batch.observations[k];
    out.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(row * n),
                     flat.begin() + static_cast<std::ptrdiff_t>((row + 1) * n));
  }
  return out;
}

}  // namespace

void DemoRecorder::on_outcome(const kernel::StepOutcome& outcome) {
  if (auto t = outcome.terminals.find(spec_.name); t != outcome.terminals.end()) {
    if (auto i = row_of(t->second, agent_)) {
      pending_.reset();
      DemoRecord rec;
      rec.observations = rows(t->second, spec_, *i);
      rec.action.assign(spec_.action.width(), 0.0f);
      rec.reward = t->second.rewards[*i];
      rec.done = true;
      rec.interrupted = t->second.interrupted[*i] != 0;
      records_.push_back(std::move(rec));
      ++episodes_;
    }
  }
  if (auto d = outcome.decisions.find(spec_.name); d != outcome.decisions.end()) {
    if (auto i = row_of(d->second, agent_)) {
      DemoRecord rec;
      rec.observations = rows(d->second, spec_, *i);
      rec.reward = d->second.rewards[*i];
      pending_ = std::move(rec);
    }
  }
}

void DemoRecorder::on_action(std::span<const float> action) {
  if (!pending_) return;
  if (action.size() != spec_.action.width()) {
    throw Error(ErrorCode::kShapeMismatch, "recorded action width differs from spec");
  }
  pending_->action.assign(action.begin(), action.end());
  records_.push_back(std::move(*pending_));
  pending_.reset();
}

void DemoRecorder::clear() {
  pending_.reset();
  records_.clear();
  episodes_ = 0;
}

DemoFile record_scripted(const std::string& env, int episodes, std::uint64_t seed,
                         const std::map<std::string, double>& params) {
  auto academy = envsuite::make_env(env, params, seed);
  const auto policy = envsuite::scripted_policy(env);
  const auto& spec = academy->behaviors().front();
  const kernel::AgentId agent = academy->agents_of(spec.name).front();
  DemoRecorder recorder(spec, agent);
  auto outcome = academy->reset(seed);
  while (recorder.episodes() < static_cast<std::size_t>(episodes)) {
    recorder.on_outcome(outcome);
    if (recorder.episodes() >= static_cast<std::size_t>(episodes)) break;
    kernel::ActionMap actions;
    for (const auto& [name, batch] : outcome.decisions) {
      auto& ab = actions[name];
      ab.agent_ids = batch.agent_ids;
      for (auto id : batch.agent_ids) {
        auto a = policy(*academy, id);
        if (id == agent) recorder.on_action(a);
        ab.values.insert(ab.values.end(), a.begin(), a.end());
      }
    }
    outcome = academy->step(actions);
  }
  return DemoFile{kDemoVersion, spec, recorder.records()};
}

}  // namespace agentsim::protocol
