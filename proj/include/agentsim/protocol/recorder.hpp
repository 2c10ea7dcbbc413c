#pragma once

#include <optional>
#include <span>

#include "agentsim/kernel/academy.hpp"
#include "agentsim/protocol/demo.hpp"

namespace agentsim::protocol {

// Turns the step stream of one agent into demo records. Feed every outcome
// with on_outcome() and the agent's chosen action with on_action().
class DemoRecorder {
 public:
  DemoRecorder(kernel::BehaviorSpec spec, kernel::AgentId agent)
      : spec_(std::move(spec)), agent_(agent) {}

  void on_outcome(const kernel::StepOutcome& outcome);
  // Completes the pending decision record; ignored when none is pending.
  void on_action(std::span<const float> action);
  // Drops a decision that will never receive an action.
  void discard_pending() { pending_.reset(); }

  const kernel::BehaviorSpec& spec() const { return spec_; }
  kernel::AgentId agent() const { return agent_; }
  bool awaiting_action() const { return pending_.has_value(); }
  const std::vector<DemoRecord>& records() const { return records_; }
  std::size_t episodes() const { return episodes_; }
  void clear();

 private:
  kernel::BehaviorSpec spec_;
  kernel::AgentId agent_;
  std::optional<DemoRecord> pending_;
  std::vector<DemoRecord> records_;
  std::size_t episodes_ = 0;
};

// Rolls out the scripted expert of `env` for `episodes` episodes of its
// first agent and returns the recorded demonstration.
DemoFile record_scripted(const std::string& env, int episodes, std::uint64_t seed,
                         const std::map<std::string, double>& params = {});

}  // namespace agentsim::protocol
