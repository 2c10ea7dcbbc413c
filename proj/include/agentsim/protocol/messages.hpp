#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "agentsim/kernel/academy.hpp"
#include "agentsim/kernel/spec.hpp"
#include "agentsim/protocol/wire.hpp"

namespace agentsim::protocol {

inline constexpr std::uint16_t kProtocolVersion = 1;
inline constexpr std::uint16_t kDefaultPort = 5004;
// Frames above this size are refused before any allocation.
inline constexpr std::uint32_t kMaxFrameLength = 64u << 20;

enum class MessageType : std::uint8_t {
  kPing = 0x00,
  kHello = 0x01,
  kHelloAck = 0x02,
  kReset = 0x03,
  kStepRequest = 0x04,
  kStepResponse = 0x05,
  kSideChannel = 0x06,
  kError = 0x07,
};

enum Channel : std::uint8_t {
  kChannelAck = 0x00,
  kChannelEnvParams = 0x01,
};

struct Ping {
  bool operator==(const Ping&) const = default;
};

struct Hello {
  std::uint16_t version = kProtocolVersion;
  std::uint32_t capabilities = 0;
  bool operator==(const Hello&) const = default;
};

struct HelloAck {
  std::uint16_t version = kProtocolVersion;
  std::uint32_t capabilities = 0;
  std::vector<kernel::BehaviorSpec> manifest;
  bool operator==(const HelloAck&) const = default;
};

struct ResetRequest {
  std::int64_t seed = -1;  // -1: server draws from entropy
  bool operator==(const ResetRequest&) const = default;
};

struct StepRequest {
  kernel::ActionMap actions;
  bool operator==(const StepRequest&) const = default;
};

struct StepResponse {
  kernel::StepOutcome outcome;
  bool operator==(const StepResponse&) const = default;
};

struct SideChannel {
  std::uint8_t channel = kChannelEnvParams;
  Bytes body;
  bool operator==(const SideChannel&) const = default;
};

struct ErrorMessage {
  std::uint16_t code = 0;
  std::string message;
  bool operator==(const ErrorMessage&) const = default;
};

using Message = std::variant<Ping, Hello, HelloAck, ResetRequest, StepRequest, StepResponse,
                             SideChannel, ErrorMessage>;

MessageType type_of(const Message& m);

// Full frame: u32 LE length, type byte, body.
Bytes encode_message(const Message& m);
// Type byte plus body, without the length prefix.
Bytes encode_payload(const Message& m);

// Decodes exactly one frame at the front of `bytes`. Raises Truncated when
// the frame is incomplete, UnknownType for an unassigned type byte and
// MalformedBody for a body that does not parse. `consumed` receives the
// frame size when the length prefix was readable, so a caller can skip a
// rejected frame and keep the session.
Message decode_message(std::span<const std::uint8_t> bytes, std::size_t* consumed = nullptr);
Message decode_payload(std::span<const std::uint8_t> payload);

// Environment-parameter side channel body: u16 count + (string, f32) pairs.
using ParamList = std::vector<std::pair<std::string, float>>;
Bytes encode_env_params(const ParamList& params);
ParamList decode_env_params(std::span<const std::uint8_t> body);

// Reply on channel 0x00 to every side-channel message.
struct SideChannelAck {
  enum Status : std::uint8_t { kOk = 0, kUnknownChannel = 1 };
  std::uint8_t status = kOk;
  std::uint8_t channel = 0;
  std::uint16_t applied = 0;
  bool operator==(const SideChannelAck&) const = default;
};
Bytes encode_ack(const SideChannelAck& ack);
SideChannelAck decode_ack(std::span<const std::uint8_t> body);

void write_behavior_spec(Writer& w, const kernel::BehaviorSpec& spec);
kernel::BehaviorSpec read_behavior_spec(Reader& r);

}  // namespace agentsim::protocol
