#pragma once

#include <optional>
#include <string>

#include "agentsim/kernel/academy.hpp"
#include "agentsim/protocol/messages.hpp"
#include "agentsim/protocol/socket.hpp"

namespace agentsim::protocol {

// Trainer-side session over TCP. Server Error frames are rethrown as Error
// with the transmitted code.
class Client {
 public:
  static Client connect(const std::string& host, std::uint16_t port, Hello hello = {});

  const HelloAck& manifest() const { return ack_; }
  kernel::StepOutcome reset(std::optional<std::int64_t> seed = std::nullopt);
  kernel::StepOutcome step(const kernel::ActionMap& actions);
  SideChannelAck set_env_params(const ParamList& params);
  SideChannelAck side_channel(std::uint8_t channel, Bytes body);
  void ping();
  // Sends one message and returns the reply as-is (no error translation).
  Message exchange(const Message& request);
  void close() { socket_.close(); }

 private:
  explicit Client(Socket s) : socket_(std::move(s)) {}
  Message checked(const Message& request);

  Socket socket_;
  HelloAck ack_;
};

}  // namespace agentsim::protocol
