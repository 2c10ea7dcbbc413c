#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "agentsim/kernel/spec.hpp"
#include "agentsim/protocol/wire.hpp"

namespace agentsim::protocol {

inline constexpr std::uint16_t kDemoVersion = 1;

// One agent transition. Decision records carry the action the expert took
// on `observations`; the terminal record of an episode has done = 1 and an
// all-zero action.
struct DemoRecord {
  std::vector<std::vector<float>> observations;  // one per observation spec
  std::vector<float> action;
  float reward = 0.0f;  // reward reported together with `observations`
  bool done = false;
  bool interrupted = false;

  bool operator==(const DemoRecord&) const = default;
};

struct DemoFile {
  std::uint16_t version = kDemoVersion;
  kernel::BehaviorSpec spec;
  std::vector<DemoRecord> records;

  bool operator==(const DemoFile&) const = default;
};

// Tensor shape of one observation as stored: the spec shape, with a leading
// stack axis when stack > 1.
std::vector<std::int32_t> stored_shape(const kernel::ObservationSpec& spec);

Bytes encode_demo(const DemoFile& demo);
// Raises BadMagic, VersionUnsupported, ShapeMismatch or MalformedBody.
DemoFile decode_demo(std::span<const std::uint8_t> bytes);

void write_demo(const std::filesystem::path& path, const kernel::BehaviorSpec& spec,
                const std::vector<DemoRecord>& records);
DemoFile read_demo(const std::filesystem::path& path);

// Number of episodes (records with done = 1).
std::size_t episode_count(const DemoFile& demo);

}  // namespace agentsim::protocol
