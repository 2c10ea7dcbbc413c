#pragma once

#include <string>
#include <vector>

#include "agentsim/core/rng.hpp"
#include "agentsim/protocol/messages.hpp"

namespace wirefuzz {

using namespace agentsim;
using namespace agentsim::protocol;
using kernel::ActionSpec;
using kernel::BehaviorSpec;
using kernel::ObservationSpec;

inline std::string random_name(Rng& rng) {
  std::string s;
  const auto n = rng.below(6) + 1;
  for (std::uint64_t i = 0; i < n; ++i) s += static_cast<char>('A' + rng.below(26));
  return s;
}

inline std::vector<float> random_floats(Rng& rng, std::size_t n) {
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.uniform(-100, 100));
  return v;
}

inline BehaviorSpec random_spec(Rng& rng) {
  BehaviorSpec s;
  s.name = random_name(rng);
  const auto n = rng.below(3) + 1;
  for (std::uint64_t i = 0; i < n; ++i) {
    switch (rng.below(3)) {
      case 0: s.observations.push_back(ObservationSpec::vector(static_cast<int>(rng.below(9) + 1))); break;
      case 1: s.observations.push_back(ObservationSpec::raycast(3, 2, static_cast<int>(rng.below(3) + 1))); break;
      default: s.observations.push_back(ObservationSpec::visual(4, 5)); break;
    }
  }
  if (rng.below(2)) {
    s.action = ActionSpec::continuous(static_cast<int>(rng.below(4) + 1));
  } else {
    std::vector<int> br(rng.below(3) + 1);
    for (auto& b : br) b = static_cast<int>(rng.below(5) + 1);
    s.action = ActionSpec::discrete(br);
  }
  return s;
}

inline Message random_message(Rng& rng) {
  switch (rng.below(8)) {
    case 0: return Ping{};
    case 1: return Hello{static_cast<std::uint16_t>(rng.below(65536)), static_cast<std::uint32_t>(rng.next_u64())};
    case 2: {
      HelloAck a{1, static_cast<std::uint32_t>(rng.below(4)), {}};
      for (std::uint64_t i = rng.below(4); i > 0; --i) a.manifest.push_back(random_spec(rng));
      return a;
    }
    case 3: return ResetRequest{static_cast<std::int64_t>(rng.next_u64())};
    case 4: {
      StepRequest s;
      for (std::uint64_t i = rng.below(3); i > 0; --i) {
        kernel::ActionBatch b;
        const auto rows = rng.below(5);
        const auto width = rng.below(3) + 1;
        for (std::uint64_t k = 0; k < rows; ++k) b.agent_ids.push_back(static_cast<int>(k * 3));
        b.values = random_floats(rng, rows * width);
        s.actions[random_name(rng)] = b;
      }
      return s;
    }
    case 5: {
      StepResponse s;
      for (std::uint64_t i = rng.below(3); i > 0; --i) {
        const auto name = random_name(rng);
        const auto rows = rng.below(4);
        kernel::DecisionBatch d;
        kernel::TerminalBatch t;
        for (std::uint64_t k = 0; k < rows; ++k) d.agent_ids.push_back(static_cast<int>(k));
        d.rewards = random_floats(rng, rows);
        const auto term = rng.below(3);
        for (std::uint64_t k = 0; k < term; ++k) {
          t.agent_ids.push_back(static_cast<int>(k + 10));
          t.interrupted.push_back(static_cast<std::uint8_t>(rng.below(2)));
        }
        t.rewards = random_floats(rng, term);
        for (std::uint64_t o = rng.below(3) + 1; o > 0; --o) {
          const auto width = rng.below(6) + 1;
          d.observations.push_back(random_floats(rng, rows * width));
          t.observations.push_back(random_floats(rng, term * width));
        }
        s.outcome.decisions[name] = d;
        s.outcome.terminals[name] = t;
      }
      return s;
    }
    case 6: {
      SideChannel c{static_cast<std::uint8_t>(rng.below(256)), {}};
      for (std::uint64_t i = rng.below(20); i > 0; --i) c.body.push_back(static_cast<std::uint8_t>(rng.below(256)));
      return c;
    }
    default:
      return ErrorMessage{static_cast<std::uint16_t>(rng.below(22)), random_name(rng)};
  }
}

}  // namespace wirefuzz
