#include "agentsim/protocol/messages.hpp"

#include <limits>

#include "agentsim/core/error.hpp"

namespace agentsim::protocol {

namespace {

using kernel::ActionBatch;
using kernel::ActionKind;
using kernel::AgentId;
using kernel::DecisionBatch;
using kernel::Modality;
using kernel::TerminalBatch;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedBody, what);
}

std::uint8_t checked_u8(std::size_t n, const char* what) {
  if (n > 255) malformed(std::string(what) + " count above 255");
  return static_cast<std::uint8_t>(n);
}

std::uint16_t checked_u16(std::size_t n, const char* what) {
  if (n > std::numeric_limits<std::uint16_t>::max()) {
    malformed(std::string(what) + " count above 65535");
  }
  return static_cast<std::uint16_t>(n);
}

void write_ids(Writer& w, const std::vector<AgentId>& ids) {
  w.u32(static_cast<std::uint32_t>(ids.size()));
  for (auto id : ids) w.i32(id);
}

std::vector<AgentId> read_ids(Reader& r) {
  const auto n = r.u32();
  r.require(n, 4);
  std::vector<AgentId> ids(n);
  for (auto& id : ids) id = r.i32();
  return ids;
}

void write_rows(Writer& w, std::size_t rows, const std::vector<float>& flat) {
  if (rows == 0) {
    if (!flat.empty()) throw Error(ErrorCode::kShapeMismatch, "values without agent ids");
    const std::int32_t shape[2] = {0, 0};
    w.tensor(shape, flat);
    return;
  }
  if (flat.size() % rows != 0) {
    throw Error(ErrorCode::kShapeMismatch, "row data not divisible by agent count");
  }
  const std::int32_t shape[2] = {static_cast<std::int32_t>(rows),
                                 static_cast<std::int32_t>(flat.size() / rows)};
  w.tensor(shape, flat);
}

std::vector<float> read_rows(Reader& r, std::size_t rows) {
  Tensor t = r.tensor();
  if (t.shape.size() != 2 || static_cast<std::size_t>(t.shape[0]) != rows) {
    malformed("row tensor does not have one row per agent");
  }
  return std::move(t.data);
}

void write_floats(Writer& w, const std::vector<float>& v) {
  for (float x : v) w.f32(x);
}

std::vector<float> read_floats(Reader& r, std::size_t n) {
  r.require(n, 4);
  std::vector<float> v(n);
  for (auto& x : v) x = r.f32();
  return v;
}

void write_observations(Writer& w, std::size_t rows, const std::vector<std::vector<float>>& obs) {
  w.u8(checked_u8(obs.size(), "observation"));
  for (const auto& o : obs) write_rows(w, rows, o);
}

std::vector<std::vector<float>> read_observations(Reader& r, std::size_t rows) {
  const auto n = r.u8();
  std::vector<std::vector<float>> obs;
  obs.reserve(n);
  for (int i = 0; i < n; ++i) obs.push_back(read_rows(r, rows));
  return obs;
}

void check_lengths(std::size_t ids, std::size_t rewards) {
  if (ids != rewards) throw Error(ErrorCode::kShapeMismatch, "one reward per agent required");
}

void write_body(Writer& w, const Message& m) {
  std::visit(
      [&](const auto& msg) {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, Ping>) {
        } else if constexpr (std::is_same_v<T, Hello>) {
          w.u16(msg.version);
          w.u32(msg.capabilities);
        } else if constexpr (std::is_same_v<T, HelloAck>) {
          w.u16(msg.version);
          w.u32(msg.capabilities);
          w.u16(checked_u16(msg.manifest.size(), "behavior"));
          for (const auto& spec : msg.manifest) write_behavior_spec(w, spec);
        } else if constexpr (std::is_same_v<T, ResetRequest>) {
          w.i64(msg.seed);
        } else if constexpr (std::is_same_v<T, StepRequest>) {
          w.u16(checked_u16(msg.actions.size(), "behavior"));
          for (const auto& [name, batch] : msg.actions) {
            w.string(name);
            write_ids(w, batch.agent_ids);
            write_rows(w, batch.agent_ids.size(), batch.values);
          }
        } else if constexpr (std::is_same_v<T, StepResponse>) {
          w.u16(checked_u16(msg.outcome.decisions.size(), "behavior"));
          for (const auto& [name, b] : msg.outcome.decisions) {
            check_lengths(b.agent_ids.size(), b.rewards.size());
            w.string(name);
            write_ids(w, b.agent_ids);
            write_floats(w, b.rewards);
            write_observations(w, b.size(), b.observations);
          }
          w.u16(checked_u16(msg.outcome.terminals.size(), "behavior"));
          for (const auto& [name, b] : msg.outcome.terminals) {
            check_lengths(b.agent_ids.size(), b.rewards.size());
            check_lengths(b.agent_ids.size(), b.interrupted.size());
            w.string(name);
            write_ids(w, b.agent_ids);
            write_floats(w, b.rewards);
            for (auto f : b.interrupted) w.u8(f);
            write_observations(w, b.size(), b.observations);
          }
        } else if constexpr (std::is_same_v<T, SideChannel>) {
          w.u8(msg.channel);
          w.raw(msg.body);
        } else if constexpr (std::is_same_v<T, ErrorMessage>) {
          w.u16(msg.code);
          w.string(msg.message);
        }
      },
      m);
}

}  // namespace

void write_behavior_spec(Writer& w, const kernel::BehaviorSpec& spec) {
  w.string(spec.name);
  w.u8(checked_u8(spec.observations.size(), "observation spec"));
  for (const auto& o : spec.observations) {
    w.u8(static_cast<std::uint8_t>(o.modality));
    w.u8(checked_u8(o.shape.size(), "dimension"));
    for (int d : o.shape) w.i32(d);
    w.i32(o.stack);
  }
  w.u8(static_cast<std::uint8_t>(spec.action.kind));
  if (spec.action.kind == ActionKind::kDiscrete) {
    w.u8(checked_u8(spec.action.branches.size(), "branch"));
    for (int b : spec.action.branches) w.i32(b);
  } else {
    w.i32(spec.action.continuous_dim);
  }
}

kernel::BehaviorSpec read_behavior_spec(Reader& r) {
  kernel::BehaviorSpec spec;
  spec.name = r.string();
  const auto n_obs = r.u8();
  for (int i = 0; i < n_obs; ++i) {
    kernel::ObservationSpec o;
    const auto modality = r.u8();
    if (modality > static_cast<std::uint8_t>(Modality::kVisual)) malformed("unknown modality");
    o.modality = static_cast<Modality>(modality);
    const auto rank = r.u8();
    r.require(rank, 4);
    o.shape.resize(rank);
    for (auto& d : o.shape) d = r.i32();
    o.stack = r.i32();
    spec.observations.push_back(std::move(o));
  }
  const auto kind = r.u8();
  if (kind == static_cast<std::uint8_t>(ActionKind::kDiscrete)) {
    const auto n = r.u8();
    r.require(n, 4);
    spec.action.kind = ActionKind::kDiscrete;
    spec.action.branches.resize(n);
    for (auto& b : spec.action.branches) b = r.i32();
  } else if (kind == static_cast<std::uint8_t>(ActionKind::kContinuous)) {
    spec.action.kind = ActionKind::kContinuous;
    spec.action.continuous_dim = r.i32();
  } else {
    malformed("unknown action kind");
  }
  return spec;
}

MessageType type_of(const Message& m) {
  return static_cast<MessageType>(m.index());
}

Bytes encode_payload(const Message& m) {
  Writer w;
  w.u8(static_cast<std::uint8_t>(type_of(m)));
  write_body(w, m);
  return w.take();
}

Bytes encode_message(const Message& m) {
  Writer w;
  w.u32(0);
  w.u8(static_cast<std::uint8_t>(type_of(m)));
  write_body(w, m);
  Bytes out = w.take();
  const auto len = static_cast<std::uint32_t>(out.size() - 4);
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(len >> (8 * i));
  return out;
}

Message decode_payload(std::span<const std::uint8_t> payload) {
  if (payload.empty()) malformed("empty payload has no type byte");
  Reader r(payload.subspan(1));
  Message out;
  switch (static_cast<MessageType>(payload[0])) {
    case MessageType::kPing:
      out = Ping{};
      break;
    case MessageType::kHello: {
      Hello h;
      h.version = r.u16();
      h.capabilities = r.u32();
      out = h;
      break;
    }
    case MessageType::kHelloAck: {
      HelloAck a;
      a.version = r.u16();
      a.capabilities = r.u32();
      const auto n = r.u16();
      for (int i = 0; i < n; ++i) a.manifest.push_back(read_behavior_spec(r));
      out = std::move(a);
      break;
    }
    case MessageType::kReset:
      out = ResetRequest{r.i64()};
      break;
    case MessageType::kStepRequest: {
      StepRequest s;
      const auto n = r.u16();
      for (int i = 0; i < n; ++i) {
        std::string name = r.string();
        ActionBatch b;
        b.agent_ids = read_ids(r);
        b.values = read_rows(r, b.agent_ids.size());
        if (!s.actions.emplace(std::move(name), std::move(b)).second) {
          malformed("behavior listed twice");
        }
      }
      out = std::move(s);
      break;
    }
    case MessageType::kStepResponse: {
      StepResponse s;
      const auto nd = r.u16();
      for (int i = 0; i < nd; ++i) {
        std::string name = r.string();
        DecisionBatch b;
        b.agent_ids = read_ids(r);
        b.rewards = read_floats(r, b.agent_ids.size());
        b.observations = read_observations(r, b.agent_ids.size());
        if (!s.outcome.decisions.emplace(std::move(name), std::move(b)).second) {
          malformed("behavior listed twice");
        }
      }
      const auto nt = r.u16();
      for (int i = 0; i < nt; ++i) {
        std::string name = r.string();
        TerminalBatch b;
        b.agent_ids = read_ids(r);
        b.rewards = read_floats(r, b.agent_ids.size());
        auto flags = r.raw(b.agent_ids.size());
        b.interrupted.assign(flags.begin(), flags.end());
        b.observations = read_observations(r, b.agent_ids.size());
        if (!s.outcome.terminals.emplace(std::move(name), std::move(b)).second) {
          malformed("behavior listed twice");
        }
      }
      out = std::move(s);
      break;
    }
    case MessageType::kSideChannel: {
      SideChannel c;
      c.channel = r.u8();
      auto body = r.rest();
      c.body.assign(body.begin(), body.end());
      out = std::move(c);
      break;
    }
    case MessageType::kError: {
      ErrorMessage e;
      e.code = r.u16();
      e.message = r.string();
      out = std::move(e);
      break;
    }
    default:
      throw Error(ErrorCode::kUnknownType,
                  "message type 0x" + hex(payload.first(1)) + " is not assigned");
  }
  r.expect_end();
  return out;
}

Message decode_message(std::span<const std::uint8_t> bytes, std::size_t* consumed) {
  if (bytes.size() < 4) {
    throw Error(ErrorCode::kTruncated, "frame header needs 4 bytes, have " +
                                          std::to_string(bytes.size()));
  }
  const std::uint32_t len = static_cast<std::uint32_t>(bytes[0]) |
                            (static_cast<std::uint32_t>(bytes[1]) << 8) |
                            (static_cast<std::uint32_t>(bytes[2]) << 16) |
                            (static_cast<std::uint32_t>(bytes[3]) << 24);
  if (bytes.size() - 4 < len) {
    throw Error(ErrorCode::kTruncated, "declared length " + std::to_string(len) + ", " +
                                           std::to_string(bytes.size() - 4) + " bytes present");
  }
  if (consumed) *consumed = 4 + static_cast<std::size_t>(len);
  return decode_payload(bytes.subspan(4, len));
}

Bytes encode_env_params(const ParamList& params) {
  Writer w;
  w.u16(checked_u16(params.size(), "parameter"));
  for (const auto& [key, value] : params) {
    w.string(key);
    w.f32(value);
  }
  return w.take();
}

ParamList decode_env_params(std::span<const std::uint8_t> body) {
  Reader r(body);
  const auto n = r.u16();
  r.require(n, 6);
  ParamList out;
  for (int i = 0; i < n; ++i) {
    std::string key = r.string();
    out.emplace_back(std::move(key), r.f32());
  }
  r.expect_end();
  return out;
}

Bytes encode_ack(const SideChannelAck& ack) {
  Writer w;
  w.u8(ack.status);
  w.u8(ack.channel);
  w.u16(ack.applied);
  return w.take();
}

SideChannelAck decode_ack(std::span<const std::uint8_t> body) {
  Reader r(body);
  SideChannelAck a;
  a.status = r.u8();
  a.channel = r.u8();
  a.applied = r.u16();
  r.expect_end();
  return a;
}

}  // namespace agentsim::protocol
