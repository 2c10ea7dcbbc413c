#include "agentsim/protocol/server.hpp"

#include "agentsim/core/error.hpp"
#include "agentsim/core/log.hpp"

namespace agentsim::protocol {

Session::Reply Session::error(ErrorCode code, const std::string& message, bool close) {
  return {ErrorMessage{static_cast<std::uint16_t>(code), message}, close};
}

Session::Reply Session::handle_decode_error(const Error& e) {
  // UnknownType and MalformedBody arrive inside an intact frame, so the
  // session carries on. Anything else means the byte stream is lost.
  const bool fatal = e.code() != ErrorCode::kUnknownType && e.code() != ErrorCode::kMalformedBody;
  if (fatal) state_ = State::kClosed;
  return error(e.code(), e.what(), fatal);
}

Session::Reply Session::handle_payload(std::span<const std::uint8_t> payload) {
  Message m;
  try {
    m = decode_payload(payload);
  } catch (const Error& e) {
    return handle_decode_error(e);
  }
  return handle(m);
}

Session::Reply Session::handle(const Message& request) {
  if (std::holds_alternative<Ping>(request)) return {Ping{}};

  if (const auto* hello = std::get_if<Hello>(&request)) {
    if (state_ != State::kAwaitHello) {
      return error(ErrorCode::kProtocolOrderViolation, "handshake already completed");
    }
    if (hello->version != kProtocolVersion) {
      state_ = State::kClosed;
      return error(ErrorCode::kVersionMismatch,
                   "client protocol " + std::to_string(hello->version) + ", server " +
                       std::to_string(kProtocolVersion),
                   true);
    }
    capabilities_ = hello->capabilities & kServerCapabilities;
    state_ = State::kReady;
    return {HelloAck{kProtocolVersion, capabilities_, academy_.behaviors()}};
  }

  if (state_ == State::kAwaitHello) {
    return error(ErrorCode::kProtocolOrderViolation, "Hello must come first");
  }

  if (const auto* reset = std::get_if<ResetRequest>(&request)) {
    const std::uint64_t seed =
        reset->seed < 0 ? entropy_seed() : static_cast<std::uint64_t>(reset->seed);
    if (metrics_) {
      metrics_->write(Json{{"event", "reset"}, {"step", academy_.step_count()}, {"seed", seed}});
    }
    StepResponse response{academy_.reset(seed)};
    state_ = State::kStepping;
    ++exchanges_;
    return {std::move(response)};
  }

  if (const auto* step = std::get_if<StepRequest>(&request)) {
    if (state_ != State::kStepping) {
      return error(ErrorCode::kProtocolOrderViolation, "StepRequest before ResetRequest");
    }
    try {
      StepResponse response{academy_.step(step->actions)};
      ++exchanges_;
      return {std::move(response)};
    } catch (const Error& e) {
      return error(e.code(), e.what());
    }
  }

  if (const auto* side = std::get_if<SideChannel>(&request)) return side_channel(*side);

  return error(ErrorCode::kProtocolOrderViolation, "message type is server-to-client only");
}

SideChannelAck apply_side_channel(kernel::Academy& academy, const SideChannel& msg) {
  SideChannelAck ack;
  ack.channel = msg.channel;
  if (msg.channel != kChannelEnvParams) {
    log_warning("ignoring side channel " + std::to_string(msg.channel));
    ack.status = SideChannelAck::kUnknownChannel;
    return ack;
  }
  for (const auto& [key, value] : decode_env_params(msg.body)) {
    academy.set_environment_parameter(key, value);
    ++ack.applied;
  }
  return ack;
}

Session::Reply Session::side_channel(const SideChannel& msg) {
  try {
    return {SideChannel{kChannelAck, encode_ack(apply_side_channel(academy_, msg))}};
  } catch (const Error& e) {
    return error(e.code(), e.what());
  }
}

Server::Server(kernel::Academy& academy, ServerOptions options)
    : academy_(academy), options_(std::move(options)) {
  if (!options_.metrics_path.empty()) {
    metrics_.open(options_.metrics_path);
    academy_.set_episode_listener(
        [this](const kernel::EpisodeSummary& s) { metrics_.write(episode_record(s)); });
  }
}

void Server::bind() {
  listener_ = listen_tcp(options_.host, options_.port);
  port_ = listener_.local_port();
}

void Server::serve(const std::atomic<bool>& stop) {
  while (!stop.load()) serve_one(stop);
}

bool Server::serve_one(const std::atomic<bool>& stop) {
  if (!listener_.valid()) bind();
  while (!stop.load()) {
    auto client = accept_client(listener_, 100);
    if (!client) continue;
    ++sessions_;
    run_session(*client, stop);
    metrics_.flush();
    return true;
  }
  return false;
}

void Server::run_session(Socket& client, const std::atomic<bool>& stop) {
  Session session(academy_, metrics_.is_open() ? &metrics_ : nullptr);
  try {
    while (!stop.load()) {
      if (!client.wait_readable(100)) continue;
      std::optional<Bytes> payload;
      Session::Reply reply;
      try {
        payload = read_frame(client);
        if (!payload) return;
        reply = session.handle_payload(*payload);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kIo) throw;
        reply = session.handle_decode_error(e);
        reply.close = true;
      }
      write_frame(client, reply.message);
      if (reply.close) return;
    }
  } catch (const Error& e) {
    log_warning(std::string("session ended: ") + e.what());
  }
}

}  // namespace agentsim::protocol
