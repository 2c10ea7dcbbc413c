#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agentsim/core/rng.hpp"
#include "agentsim/kernel/spec.hpp"
#include "agentsim/sensors/sensors.hpp"
#include "agentsim/worldsim/world.hpp"

namespace agentsim::kernel {

// Fixed simulated seconds per tick.
inline constexpr double kFixedDt = 0.02;
inline constexpr int kDefaultDecisionInterval = 5;

using AgentId = std::int32_t;

struct AgentHandle {
  AgentId id = -1;
  std::string behavior_name;
  int decision_interval = kDefaultDecisionInterval;
  std::optional<int> max_step;  // ticks
  double cumulative_reward = 0.0;
  int episode_step = 0;  // ticks since episode start
};

// Observations are stored per observation spec as a flat row-major block of
// `agent_ids.size() * spec.size()` floats.
struct DecisionBatch {
  std::vector<AgentId> agent_ids;
  std::vector<std::vector<float>> observations;
  std::vector<float> rewards;

  std::size_t size() const { return agent_ids.size(); }
  bool operator==(const DecisionBatch&) const = default;
};

struct TerminalBatch {
  std::vector<AgentId> agent_ids;
  std::vector<std::vector<float>> observations;
  std::vector<float> rewards;
  std::vector<std::uint8_t> interrupted;

  std::size_t size() const { return agent_ids.size(); }
  bool operator==(const TerminalBatch&) const = default;
};

struct StepOutcome {
  std::map<std::string, DecisionBatch> decisions;
  std::map<std::string, TerminalBatch> terminals;

  bool operator==(const StepOutcome&) const = default;
};

// Action rows for one behavior: agent_ids.size() rows of ActionSpec::width()
// floats. Discrete rows hold branch indices as floats.
struct ActionBatch {
  std::vector<AgentId> agent_ids;
  std::vector<float> values;

  bool operator==(const ActionBatch&) const = default;
};
using ActionMap = std::map<std::string, ActionBatch>;

struct TerminalRecord {
  AgentId agent_id = -1;
  bool interrupted = false;
  double cumulative_reward = 0.0;
  int episode_step = 0;
};

// Completed-episode summary, used by metrics logging.
struct EpisodeSummary {
  AgentId agent_id = -1;
  std::string behavior_name;
  double episode_return = 0.0;
  int episode_length = 0;  // ticks
  int decisions = 0;
  bool interrupted = false;
  std::uint64_t step_count = 0;
};

// Sampler that assigns an environment parameter at every episode start.
struct ParameterSampler {
  enum class Kind { kUniform, kChoice } kind = Kind::kUniform;
  double low = 0.0;
  double high = 0.0;
  std::vector<double> choices;

  double sample(Rng& rng) const;
};

class Academy;

// Environment logic plugged into an Academy. The academy owns the agent
// lifecycle; the environment owns the world and reward rules.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  // Registers agents. Called exactly once when the academy is created.
  virtual void initialize(Academy& academy) = 0;
  // Start of a fresh episode for `agent` (reset and after every terminal).
  virtual void on_episode_begin(Academy& academy, AgentId agent) = 0;
  // The agent's current (held) action, applied once per tick before tick().
  virtual void apply_action(Academy& academy, AgentId agent, std::span<const float> action) = 0;
  // Advances the world by one fixed timestep; may add rewards and end episodes.
  virtual void tick(Academy& academy, double dt) = 0;
  // Writes the agent's unstacked observations, one span per observation spec.
  virtual void observe(const Academy& academy, AgentId agent,
                       std::span<const std::span<float>> out) const = 0;

  virtual const worldsim::World& world() const = 0;
  virtual const sensors::Palette& palette() const = 0;

  // Privileged near-optimal controller; throws NoScriptedExpert by default.
  virtual std::vector<float> expert_action(const Academy& academy, AgentId agent) const;
  virtual bool has_expert() const { return false; }

  // Environment-parameter defaults consumed by this environment.
  virtual std::map<std::string, double> parameter_defaults() const { return {}; }
};

class Academy {
 public:
  explicit Academy(std::unique_ptr<Environment> env, std::uint64_t seed = 0);
  Academy(const Academy&) = delete;
  Academy& operator=(const Academy&) = delete;

  AgentHandle register_agent(const BehaviorSpec& behavior, int decision_interval,
                             std::optional<int> max_step);

  StepOutcome reset(std::optional<std::uint64_t> seed = std::nullopt);
  StepOutcome step(const ActionMap& actions);
  TerminalRecord end_episode(AgentId agent, bool interrupted);
  // Dynamic-interval hook: the agent is included in the next decision batch.
  void request_decision(AgentId agent);
  void add_reward(AgentId agent, double reward);

  std::optional<double> set_environment_parameter(const std::string& key, double value);
  double parameter(const std::string& key, double fallback) const;
  const std::map<std::string, double>& parameters() const { return params_; }
  void set_parameter_sampler(const std::string& key, ParameterSampler sampler);
  void clear_parameter_samplers() { samplers_.clear(); }

  std::uint64_t step_count() const { return step_count_; }
  std::uint64_t seed() const { return seed_; }
  bool has_reset() const { return has_reset_; }

  const std::vector<BehaviorSpec>& behaviors() const { return behavior_list_; }
  const BehaviorSpec& behavior(const std::string& name) const;
  const AgentHandle& agent(AgentId id) const;
  std::span<const AgentHandle> agents() const { return handles_; }
  std::vector<AgentId> agents_of(const std::string& behavior) const;
  // Agents that must receive an action in the next step() call.
  std::map<std::string, std::vector<AgentId>> pending_decisions() const;
  bool episode_active(AgentId id) const;

  Environment& environment() { return *env_; }
  const Environment& environment() const { return *env_; }
  // Stream reserved for environment randomness (layouts, spawns).
  Rng& env_rng() { return env_rng_; }

  void set_episode_listener(std::function<void(const EpisodeSummary&)> listener) {
    episode_listener_ = std::move(listener);
  }

 private:
  struct AgentState {
    bool active = false;          // inside an episode
    bool needs_decision = false;  // must appear in the next decision batch
    bool awaiting_action = false; // listed in the last outcome's decisions
    bool ended = false;           // end_episode called, terminal not yet reported
    bool interrupted = false;
    double pending_reward = 0.0;
    int decisions = 0;
    std::vector<float> held_action;
    std::vector<sensors::ObservationStack> stacks;
  };

  void begin_episode(AgentId id);
  void tick_once();
  void validate_actions(const ActionMap& actions) const;
  void write_observations(AgentId id, std::vector<std::vector<float>>& dest);
  StepOutcome collect_outcome();

  std::unique_ptr<Environment> env_;
  std::uint64_t seed_ = 0;
  std::uint64_t step_count_ = 0;
  bool has_reset_ = false;
  bool initializing_ = false;
  Rng env_rng_;
  Rng param_rng_;
  std::map<std::string, double> params_;
  std::map<std::string, ParameterSampler> samplers_;
  std::vector<BehaviorSpec> behavior_list_;
  std::vector<AgentHandle> handles_;
  std::vector<AgentState> states_;
  std::function<void(const EpisodeSummary&)> episode_listener_;
  // scratch
  std::vector<std::vector<float>> frame_buf_;
};

}  // namespace agentsim::kernel
