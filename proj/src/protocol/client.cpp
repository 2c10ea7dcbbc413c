#include "agentsim/protocol/client.hpp"

#include "agentsim/core/error.hpp"

namespace agentsim::protocol {

namespace {

template <typename T>
T expect(Message m, const char* what) {
  if (auto* v = std::get_if<T>(&m)) return std::move(*v);
  throw Error(ErrorCode::kProtocolOrderViolation, std::string("expected ") + what);
}

}  // namespace

Client Client::connect(const std::string& host, std::uint16_t port, Hello hello) {
  Client c(connect_tcp(host, port));
  c.ack_ = expect<HelloAck>(c.checked(hello), "HelloAck");
  return c;
}

Message Client::exchange(const Message& request) {
  write_frame(socket_, request);
  auto payload = read_frame(socket_);
  if (!payload) throw Error(ErrorCode::kIo, "server closed the connection");
  return decode_payload(*payload);
}

Message Client::checked(const Message& request) {
  Message reply = exchange(request);
  if (const auto* e = std::get_if<ErrorMessage>(&reply)) {
    throw Error(static_cast<ErrorCode>(e->code), "server: " + e->message);
  }
  return reply;
}

kernel::StepOutcome Client::reset(std::optional<std::int64_t> seed) {
  return expect<StepResponse>(checked(ResetRequest{seed.value_or(-1)}), "StepResponse").outcome;
}

kernel::StepOutcome Client::step(const kernel::ActionMap& actions) {
  return expect<StepResponse>(checked(StepRequest{actions}), "StepResponse").outcome;
}

SideChannelAck Client::side_channel(std::uint8_t channel, Bytes body) {
  auto reply = expect<SideChannel>(checked(SideChannel{channel, std::move(body)}), "SideChannel");
  return decode_ack(reply.body);
}

SideChannelAck Client::set_env_params(const ParamList& params) {
  return side_channel(kChannelEnvParams, encode_env_params(params));
}

void Client::ping() { expect<Ping>(checked(Ping{}), "Ping"); }

}  // namespace agentsim::protocol
