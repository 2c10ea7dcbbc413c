#pragma once

#include <filesystem>
#include <span>

#include "agentsim/protocol/wire.hpp"
#include "agentsim/trainer/network.hpp"

namespace agentsim::trainer {

inline constexpr std::uint16_t kCheckpointVersion = 1;

// "AGNN", u16 version, topology descriptor, u32 count, f32 params.
protocol::Bytes encode_checkpoint(const Network<float>& net);
Network<float> decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const Network<float>& net);
Network<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace agentsim::trainer
