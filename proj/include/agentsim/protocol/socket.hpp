#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "agentsim/protocol/messages.hpp"

namespace agentsim::protocol {

// Owning POSIX TCP socket.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close(); }

  bool valid() const { return fd_ >= 0; }
  int fd() const { return fd_; }
  void close();
  void shutdown();

  void send_all(std::span<const std::uint8_t> bytes);
  // Fills `out` completely. Returns false on EOF before the first byte;
  // EOF part-way raises Truncated.
  bool recv_exact(std::span<std::uint8_t> out);
  // Waits up to `timeout_ms` for readability.
  bool wait_readable(int timeout_ms) const;
  std::uint16_t local_port() const;

 private:
  int fd_ = -1;
};

Socket listen_tcp(const std::string& host, std::uint16_t port, int backlog = 4);
// Accepts one connection, or nullopt after `timeout_ms` without one.
std::optional<Socket> accept_client(const Socket& listener, int timeout_ms);
Socket connect_tcp(const std::string& host, std::uint16_t port);

void write_frame(Socket& s, const Message& m);
// Payload (type byte + body) of the next frame, or nullopt on clean EOF.
// Oversized frames raise MalformedBody; the stream cannot be resynchronised
// after that.
std::optional<Bytes> read_frame(Socket& s);

}  // namespace agentsim::protocol
