#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "agentsim/core/error.hpp"
#include "agentsim/kernel/academy.hpp"
#include "agentsim/protocol/messages.hpp"
#include "agentsim/protocol/metrics.hpp"
#include "agentsim/protocol/socket.hpp"

namespace agentsim::protocol {

// Capability bits advertised in HelloAck (intersected with the client's).
inline constexpr std::uint32_t kCapEnvParams = 1u << 0;
inline constexpr std::uint32_t kServerCapabilities = kCapEnvParams;

// Applies a side-channel message to the academy. Environment-parameter
// entries are set in order; unknown channels are acknowledged with a warning
// status. Raises MalformedBody or NonFiniteParameter.
SideChannelAck apply_side_channel(kernel::Academy& academy, const SideChannel& msg);

// Transport-free request handler: one reply per request, in order.
class Session {
 public:
  enum class State { kAwaitHello, kReady, kStepping, kClosed };

  struct Reply {
    Message message;
    bool close = false;
  };

  explicit Session(kernel::Academy& academy, MetricsLog* metrics = nullptr)
      : academy_(academy), metrics_(metrics) {}

  Reply handle(const Message& request);
  // Reply for a payload that failed to decode.
  Reply handle_decode_error(const Error& e);
  // Decodes `payload` and handles it.
  Reply handle_payload(std::span<const std::uint8_t> payload);

  State state() const { return state_; }
  std::uint32_t capabilities() const { return capabilities_; }
  std::uint64_t exchanges() const { return exchanges_; }

 private:
  Reply error(ErrorCode code, const std::string& message, bool close = false);
  Reply side_channel(const SideChannel& msg);

  kernel::Academy& academy_;
  MetricsLog* metrics_;
  State state_ = State::kAwaitHello;
  std::uint32_t capabilities_ = 0;
  std::uint64_t exchanges_ = 0;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = kDefaultPort;  // 0 picks a free port
  std::filesystem::path metrics_path;  // empty: no metrics log
};

// Serves one trainer session at a time over TCP.
class Server {
 public:
  Server(kernel::Academy& academy, ServerOptions options);

  // Opens the listening socket; port() is valid afterwards.
  void bind();
  std::uint16_t port() const { return port_; }

  // Accepts sessions one after another until `stop` is set.
  void serve(const std::atomic<bool>& stop);
  // Serves a single session; returns false if `stop` was set before a
  // client connected.
  bool serve_one(const std::atomic<bool>& stop);

  std::uint64_t sessions() const { return sessions_; }

 private:
  void run_session(Socket& client, const std::atomic<bool>& stop);

  kernel::Academy& academy_;
  ServerOptions options_;
  Socket listener_;
  std::uint16_t port_ = 0;
  MetricsLog metrics_;
  std::uint64_t sessions_ = 0;
};

}  // namespace agentsim::protocol
