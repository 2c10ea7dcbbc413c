#include "agentsim/kernel/academy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "agentsim/core/error.hpp"

namespace agentsim::kernel {

double ParameterSampler::sample(Rng& rng) const {
  if (kind == Kind::kChoice) {
    if (choices.empty()) throw Error(ErrorCode::kInvalidConfig, "choice sampler without values");
    return choices[rng.below(choices.size())];
  }
  return rng.uniform(low, high);
}

std::vector<float> Environment::expert_action(const Academy&, AgentId) const {
  throw Error(ErrorCode::kNoScriptedExpert, name() + " has no scripted expert");
}

Academy::Academy(std::unique_ptr<Environment> env, std::uint64_t seed)
    : env_(std::move(env)), seed_(seed) {
  const Rng root(seed_);
  env_rng_ = root.split("env");
  param_rng_ = root.split("params");
  initializing_ = true;
  env_->initialize(*this);
  initializing_ = false;
}

AgentHandle Academy::register_agent(const BehaviorSpec& behavior, int decision_interval,
                                    std::optional<int> max_step) {
  validate(behavior);
  if (decision_interval < 1) {
    throw Error(ErrorCode::kSpecMismatch, "decision_interval must be positive");
  }
  if (max_step && *max_step < 1) throw Error(ErrorCode::kSpecMismatch, "max_step must be positive");
  auto it = std::find_if(behavior_list_.begin(), behavior_list_.end(),
                         [&](const BehaviorSpec& b) { return b.name == behavior.name; });
  if (it == behavior_list_.end()) {
    behavior_list_.push_back(behavior);
  } else if (!it->same_layout(behavior)) {
    throw Error(ErrorCode::kSpecMismatch,
                "behavior '" + behavior.name + "' already registered with a different spec");
  }

  AgentHandle handle;
  handle.id = static_cast<AgentId>(handles_.size());
  handle.behavior_name = behavior.name;
  handle.decision_interval = decision_interval;
  handle.max_step = max_step;
  handles_.push_back(handle);

  AgentState st;
  for (const auto& o : behavior.observations) st.stacks.emplace_back(o.stack, o.base_size());
  st.held_action.assign(behavior.action.width(), 0.0f);
  states_.push_back(std::move(st));

  if (has_reset_ && !initializing_) begin_episode(handle.id);
  return handle;
}

const BehaviorSpec& Academy::behavior(const std::string& name) const {
  for (const auto& b : behavior_list_) {
    if (b.name == name) return b;
  }
  throw Error(ErrorCode::kUnknownBehavior, name);
}

const AgentHandle& Academy::agent(AgentId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= handles_.size()) {
    throw Error(ErrorCode::kInactiveAgent, "no agent with id " + std::to_string(id));
  }
  return handles_[static_cast<std::size_t>(id)];
}

std::vector<AgentId> Academy::agents_of(const std::string& behavior) const {
  std::vector<AgentId> ids;
  for (const auto& h : handles_) {
    if (h.behavior_name == behavior) ids.push_back(h.id);
  }
  return ids;
}

std::map<std::string, std::vector<AgentId>> Academy::pending_decisions() const {
  std::map<std::string, std::vector<AgentId>> out;
  for (const auto& b : behavior_list_) out[b.name];
  for (std::size_t i = 0; i < handles_.size(); ++i) {
    if (states_[i].awaiting_action) out[handles_[i].behavior_name].push_back(handles_[i].id);
  }
  return out;
}

bool Academy::episode_active(AgentId id) const {
  agent(id);
  const auto& st = states_[static_cast<std::size_t>(id)];
  return st.active && !st.ended;
}

std::optional<double> Academy::set_environment_parameter(const std::string& key, double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kNonFiniteParameter, "parameter '" + key + "' is not finite");
  }
  std::optional<double> previous;
  if (auto it = params_.find(key); it != params_.end()) previous = it->second;
  params_[key] = value;
  return previous;
}

double Academy::parameter(const std::string& key, double fallback) const {
  auto it = params_.find(key);
  return it == params_.end() ? fallback : it->second;
}

void Academy::set_parameter_sampler(const std::string& key, ParameterSampler sampler) {
  samplers_[key] = std::move(sampler);
}

StepOutcome Academy::reset(std::optional<std::uint64_t> seed) {
  seed_ = seed.value_or(entropy_seed());
  const Rng root(seed_);
  env_rng_ = root.split("env");
  param_rng_ = root.split("params");
  step_count_ = 0;
  for (auto& st : states_) {
    st.active = false;
    st.ended = false;
    st.awaiting_action = false;
    st.needs_decision = false;
  }
  for (const auto& h : handles_) begin_episode(h.id);
  has_reset_ = true;
  return collect_outcome();
}

void Academy::begin_episode(AgentId id) {
  for (const auto& [key, sampler] : samplers_) params_[key] = sampler.sample(param_rng_);
  auto& h = handles_[static_cast<std::size_t>(id)];
  auto& st = states_[static_cast<std::size_t>(id)];
  h.cumulative_reward = 0.0;
  h.episode_step = 0;
  st.active = true;
  st.ended = false;
  st.interrupted = false;
  st.pending_reward = 0.0;
  st.decisions = 0;
  std::fill(st.held_action.begin(), st.held_action.end(), 0.0f);
  for (auto& s : st.stacks) s.reset();
  env_->on_episode_begin(*this, id);
  st.needs_decision = true;
}

void Academy::validate_actions(const ActionMap& actions) const {
  for (const auto& [name, batch] : actions) {
    const BehaviorSpec& spec = behavior(name);  // throws UnknownBehavior
    if (batch.values.size() != batch.agent_ids.size() * spec.action.width()) {
      throw Error(ErrorCode::kActionShapeMismatch,
                  name + ": expected " + std::to_string(spec.action.width()) + " values per agent");
    }
    const std::size_t width = spec.action.width();
    for (std::size_t r = 0; r < batch.agent_ids.size(); ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        const float v = batch.values[r * width + c];
        if (!std::isfinite(v)) throw Error(ErrorCode::kActionShapeMismatch, name + ": non-finite action");
        if (spec.action.kind == ActionKind::kDiscrete) {
          if (v != std::floor(v) || v < 0.0f || v >= static_cast<float>(spec.action.branches[c])) {
            throw Error(ErrorCode::kActionShapeMismatch,
                        name + ": discrete action out of range in branch " + std::to_string(c));
          }
        }
      }
    }
  }
  for (const auto& [name, pending] : pending_decisions()) {
    std::set<AgentId> provided;
    if (auto it = actions.find(name); it != actions.end()) {
      for (AgentId id : it->second.agent_ids) {
        if (!provided.insert(id).second) {
          throw Error(ErrorCode::kMissingAction, "duplicate action for agent " + std::to_string(id));
        }
      }
    }
    for (AgentId id : pending) {
      if (!provided.count(id)) {
        throw Error(ErrorCode::kMissingAction, "no action for agent " + std::to_string(id));
      }
      provided.erase(id);
    }
    if (!provided.empty()) {
      throw Error(ErrorCode::kMissingAction,
                  "agent " + std::to_string(*provided.begin()) + " is not awaiting an action");
    }
  }
}

StepOutcome Academy::step(const ActionMap& actions) {
  if (!has_reset_) throw Error(ErrorCode::kProtocolOrderViolation, "step before reset");
  validate_actions(actions);
  for (const auto& [name, batch] : actions) {
    const std::size_t width = behavior(name).action.width();
    const bool continuous = behavior(name).action.kind == ActionKind::kContinuous;
    for (std::size_t r = 0; r < batch.agent_ids.size(); ++r) {
      auto& st = states_[static_cast<std::size_t>(batch.agent_ids[r])];
      for (std::size_t c = 0; c < width; ++c) {
        float v = batch.values[r * width + c];
        st.held_action[c] = continuous ? std::clamp(v, -1.0f, 1.0f) : v;
      }
      st.awaiting_action = false;
    }
  }
  if (handles_.empty()) return collect_outcome();

  auto should_report = [this] {
    return std::any_of(states_.begin(), states_.end(), [](const AgentState& s) {
      return s.active && (s.needs_decision || s.ended);
    });
  };
  while (!should_report()) tick_once();
  return collect_outcome();
}

void Academy::tick_once() {
  for (std::size_t i = 0; i < handles_.size(); ++i) {
    if (states_[i].active && !states_[i].ended) {
      env_->apply_action(*this, handles_[i].id, states_[i].held_action);
    }
  }
  env_->tick(*this, kFixedDt);
  ++step_count_;
  for (std::size_t i = 0; i < handles_.size(); ++i) {
    auto& st = states_[i];
    auto& h = handles_[i];
    if (!st.active) continue;
    ++h.episode_step;
    if (st.ended) continue;
    if (h.max_step && h.episode_step >= *h.max_step) {
      end_episode(h.id, true);
      continue;
    }
    if (h.episode_step % h.decision_interval == 0) st.needs_decision = true;
  }
}

TerminalRecord Academy::end_episode(AgentId id, bool interrupted) {
  agent(id);
  auto& st = states_[static_cast<std::size_t>(id)];
  if (!st.active || st.ended) {
    throw Error(ErrorCode::kInactiveAgent, "agent " + std::to_string(id) + " is not in an episode");
  }
  st.ended = true;
  st.interrupted = interrupted;
  st.needs_decision = false;
  const auto& h = handles_[static_cast<std::size_t>(id)];
  return {id, interrupted, h.cumulative_reward, h.episode_step};
}

void Academy::request_decision(AgentId id) {
  agent(id);
  auto& st = states_[static_cast<std::size_t>(id)];
  if (st.active && !st.ended) st.needs_decision = true;
}

void Academy::add_reward(AgentId id, double reward) {
  agent(id);
  auto& st = states_[static_cast<std::size_t>(id)];
  if (!st.active) throw Error(ErrorCode::kInactiveAgent, "reward for inactive agent");
  st.pending_reward += reward;
  handles_[static_cast<std::size_t>(id)].cumulative_reward += reward;
}

void Academy::write_observations(AgentId id, std::vector<std::vector<float>>& dest) {
  const auto& spec = behavior(handles_[static_cast<std::size_t>(id)].behavior_name);
  auto& st = states_[static_cast<std::size_t>(id)];
  frame_buf_.resize(spec.observations.size());
  std::vector<std::span<float>> views;
  for (std::size_t k = 0; k < spec.observations.size(); ++k) {
    frame_buf_[k].assign(spec.observations[k].base_size(), 0.0f);
    views.emplace_back(frame_buf_[k]);
  }
  env_->observe(*this, id, views);
  if (dest.size() != spec.observations.size()) dest.resize(spec.observations.size());
  for (std::size_t k = 0; k < spec.observations.size(); ++k) {
    st.stacks[k].push(frame_buf_[k]);
    const std::size_t offset = dest[k].size();
    dest[k].resize(offset + spec.observations[k].size());
    st.stacks[k].stacked_into(std::span<float>(dest[k]).subspan(offset));
  }
}

StepOutcome Academy::collect_outcome() {
  StepOutcome out;
  for (const auto& b : behavior_list_) {
    out.decisions[b.name].observations.resize(b.observations.size());
    out.terminals[b.name].observations.resize(b.observations.size());
  }
  std::vector<AgentId> ended;
  for (std::size_t i = 0; i < handles_.size(); ++i) {
    auto& st = states_[i];
    const auto& h = handles_[i];
    if (!st.active || !st.ended) continue;
    auto& tb = out.terminals[h.behavior_name];
    tb.agent_ids.push_back(h.id);
    write_observations(h.id, tb.observations);
    tb.rewards.push_back(static_cast<float>(st.pending_reward));
    tb.interrupted.push_back(st.interrupted ? 1 : 0);
    ended.push_back(h.id);
  }
  for (AgentId id : ended) {
    auto& st = states_[static_cast<std::size_t>(id)];
    const auto& h = handles_[static_cast<std::size_t>(id)];
    if (episode_listener_) {
      episode_listener_({id, h.behavior_name, h.cumulative_reward, h.episode_step, st.decisions,
                         st.interrupted, step_count_});
    }
    st.active = false;
    st.ended = false;
    st.awaiting_action = false;
    begin_episode(id);
  }
  for (std::size_t i = 0; i < handles_.size(); ++i) {
    auto& st = states_[i];
    const auto& h = handles_[i];
    if (!st.active || st.ended || !st.needs_decision) continue;
    auto& db = out.decisions[h.behavior_name];
    db.agent_ids.push_back(h.id);
    write_observations(h.id, db.observations);
    db.rewards.push_back(static_cast<float>(st.pending_reward));
    st.pending_reward = 0.0;
    st.needs_decision = false;
    st.awaiting_action = true;
    ++st.decisions;
  }
  return out;
}

}  // namespace agentsim::kernel
