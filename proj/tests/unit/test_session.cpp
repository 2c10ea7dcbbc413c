#include <doctest.h>

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "agentsim/core/rng.hpp"
#include "agentsim/envsuite/gridworld.hpp"
#include "agentsim/envsuite/registry.hpp"
#include "agentsim/protocol/benchmark.hpp"
#include "agentsim/protocol/client.hpp"
#include "agentsim/protocol/server.hpp"
#include "helpers.hpp"

using namespace agentsim;
using namespace agentsim::protocol;
using kernel::ActionMap;
using kernel::StepOutcome;

namespace {

ActionMap zeros(const StepOutcome& out) {
  ActionMap m;
  for (const auto& [name, b] : out.decisions) {
    m[name].agent_ids = b.agent_ids;
    m[name].values.assign(b.size(), 0.0f);
  }
  return m;
}

ErrorCode code_of(const Session::Reply& r) {
  const auto* e = std::get_if<ErrorMessage>(&r.message);
  REQUIRE(e != nullptr);
  return static_cast<ErrorCode>(e->code);
}

const StepOutcome& outcome_of(const Session::Reply& r) {
  const auto* s = std::get_if<StepResponse>(&r.message);
  REQUIRE(s != nullptr);
  return s->outcome;
}

SideChannelAck ack_of(const Session::Reply& r) {
  const auto* s = std::get_if<SideChannel>(&r.message);
  REQUIRE(s != nullptr);
  CHECK(s->channel == kChannelAck);
  return decode_ack(s->body);
}

// Runs a Server on a loopback port for the lifetime of the object.
struct LoopbackServer {
  explicit LoopbackServer(kernel::Academy& academy, std::filesystem::path metrics = {})
      : server(academy, {.host = "127.0.0.1", .port = 0, .metrics_path = std::move(metrics)}) {
    server.bind();
    thread = std::thread([this] { server.serve(stop); });
  }
  ~LoopbackServer() {
    stop = true;
    thread.join();
  }
  std::atomic<bool> stop{false};
  Server server;
  std::thread thread;
};

}  // namespace

TEST_CASE("session handshake") {
  auto academy = envsuite::make_env("Basic", {}, 0);
  SUBCASE("version mismatch closes") {
    Session s(*academy);
    const auto r = s.handle(Hello{2, 0});
    CHECK(code_of(r) == ErrorCode::kVersionMismatch);
    CHECK(r.close);
    CHECK(s.state() == Session::State::kClosed);
  }
  SUBCASE("ack carries the manifest and intersected capabilities") {
    Session s(*academy);
    const auto r = s.handle(Hello{1, 0xffffffffu});
    const auto* ack = std::get_if<HelloAck>(&r.message);
    REQUIRE(ack != nullptr);
    CHECK(ack->manifest == academy->behaviors());
    CHECK(ack->capabilities == kServerCapabilities);
  }
  SUBCASE("anything before Hello is an order violation") {
    Session s(*academy);
    CHECK(code_of(s.handle(ResetRequest{1})) == ErrorCode::kProtocolOrderViolation);
    CHECK(std::holds_alternative<Ping>(s.handle(Ping{}).message));
  }
  SUBCASE("second Hello is rejected") {
    Session s(*academy);
    s.handle(Hello{});
    CHECK(code_of(s.handle(Hello{})) == ErrorCode::kProtocolOrderViolation);
  }
}

TEST_CASE("session stepping") {
  auto academy = envsuite::make_env("Basic", {}, 0);
  Session s(*academy);
  s.handle(Hello{});
  CHECK(code_of(s.handle(StepRequest{})) == ErrorCode::kProtocolOrderViolation);

  const StepOutcome first = outcome_of(s.handle(ResetRequest{7}));
  REQUIRE(first.decisions.at("Basic").size() == 1);
  CHECK(s.state() == Session::State::kStepping);

  SUBCASE("valid step") {
    const auto out = outcome_of(s.handle(StepRequest{zeros(first)}));
    CHECK(out.decisions.at("Basic").rewards[0] == doctest::Approx(-0.01));
  }
  SUBCASE("stale agent ids give MissingAction and keep the session") {
    ActionMap stale = zeros(first);
    stale["Basic"].agent_ids = {5};
    const auto r = s.handle(StepRequest{stale});
    CHECK(code_of(r) == ErrorCode::kMissingAction);
    CHECK_FALSE(r.close);
    CHECK(std::holds_alternative<StepResponse>(s.handle(StepRequest{zeros(first)}).message));
  }
  SUBCASE("server-to-client types are refused") {
    CHECK(code_of(s.handle(StepResponse{})) == ErrorCode::kProtocolOrderViolation);
  }
  SUBCASE("unknown type keeps the session open") {
    const Bytes payload = {0xff};
    const auto r = s.handle_payload(payload);
    CHECK(code_of(r) == ErrorCode::kUnknownType);
    CHECK_FALSE(r.close);
    CHECK(std::holds_alternative<StepResponse>(s.handle(StepRequest{zeros(first)}).message));
  }
  SUBCASE("truncated frames close the session") {
    const auto r = s.handle_decode_error(Error(ErrorCode::kTruncated, "cut"));
    CHECK(r.close);
  }
}

TEST_CASE("reset replays from the seed and logs it") {
  auto dir = testing::scratch_dir("session_reset");
  auto academy = envsuite::make_env("GridWorld", {}, 0);
  MetricsLog log(dir / "m.jsonl");
  Session s(*academy, &log);
  s.handle(Hello{});
  const auto a = outcome_of(s.handle(ResetRequest{42}));
  const auto b = outcome_of(s.handle(ResetRequest{42}));
  CHECK(a == b);
  log.close();
  std::ifstream in(dir / "m.jsonl");
  std::string line;
  REQUIRE(std::getline(in, line));
  const auto j = Json::parse(line);
  CHECK(j["event"] == "reset");
  CHECK(j["seed"] == 42);
}

TEST_CASE("side channel") {
  auto academy = envsuite::make_env("GridWorld", {}, 0);
  Session s(*academy);
  s.handle(Hello{1, kCapEnvParams});
  s.handle(ResetRequest{0});
  auto& env = static_cast<envsuite::GridWorldEnv&>(academy->environment());

  SUBCASE("grid_size applies at the next reset") {
    const auto ack = ack_of(s.handle(SideChannel{kChannelEnvParams, encode_env_params({{"grid_size", 6.0f}})}));
    CHECK(ack.status == SideChannelAck::kOk);
    CHECK(ack.applied == 1);
    CHECK(env.grid_size() == 5);
    s.handle(ResetRequest{1});
    CHECK(env.grid_size() == 6);
  }
  SUBCASE("empty list is acknowledged") {
    const auto ack = ack_of(s.handle(SideChannel{kChannelEnvParams, encode_env_params({})}));
    CHECK(ack.status == SideChannelAck::kOk);
    CHECK(ack.applied == 0);
  }
  SUBCASE("unknown channel gets a warning ack") {
    const auto ack = ack_of(s.handle(SideChannel{0x09, {1, 2, 3}}));
    CHECK(ack.status == SideChannelAck::kUnknownChannel);
    CHECK(ack.channel == 0x09);
  }
  SUBCASE("non-finite values are refused") {
    const auto r = s.handle(SideChannel{kChannelEnvParams, encode_env_params({{"grid_size", NAN}})});
    CHECK(code_of(r) == ErrorCode::kNonFiniteParameter);
  }
}

TEST_CASE("TCP client and server: FoodCollector batches four agents") {
  auto academy = envsuite::make_env("FoodCollector", {}, 0);
  LoopbackServer srv(*academy);
  auto client = Client::connect("127.0.0.1", srv.server.port());
  CHECK(client.manifest().manifest == academy->behaviors());
  client.ping();
  auto out = client.reset(3);
  CHECK(out.decisions.at("FoodCollector").size() == 4);
  out = client.step(zeros(out));
  CHECK(out.decisions.at("FoodCollector").size() == 4);
  CHECK(client.set_env_params({}).applied == 0);
  CHECK(client.side_channel(9, {}).status == SideChannelAck::kUnknownChannel);
  ActionMap bad = zeros(out);
  bad["FoodCollector"].agent_ids.pop_back();
  bad["FoodCollector"].values.pop_back();
  CHECK_ERROR_CODE(client.step(bad), ErrorCode::kMissingAction);
  client.close();
}

TEST_CASE("TCP client with the wrong version is refused") {
  auto academy = envsuite::make_env("Basic", {}, 0);
  LoopbackServer srv(*academy);
  CHECK_ERROR_CODE(Client::connect("127.0.0.1", srv.server.port(), Hello{2, 0}),
                   ErrorCode::kVersionMismatch);
}

TEST_CASE("oversized frames are refused") {
  auto academy = envsuite::make_env("Basic", {}, 0);
  LoopbackServer srv(*academy);
  Socket s = connect_tcp("127.0.0.1", srv.server.port());
  const std::uint32_t len = kMaxFrameLength + 1;
  const Bytes header = {static_cast<std::uint8_t>(len), static_cast<std::uint8_t>(len >> 8),
                        static_cast<std::uint8_t>(len >> 16), static_cast<std::uint8_t>(len >> 24)};
  s.send_all(header);
  const auto reply = read_frame(s);
  REQUIRE(reply.has_value());
  const Message m = decode_payload(*reply);
  const auto* e = std::get_if<ErrorMessage>(&m);
  REQUIRE(e != nullptr);
  CHECK(e->code == static_cast<std::uint16_t>(ErrorCode::kMalformedBody));
}

TEST_CASE("1000-step parity between client rewards and the server metrics log") {
  auto dir = testing::scratch_dir("parity");
  auto academy = envsuite::make_env("Basic", {}, 0);
  std::vector<double> client_returns;
  {
    LoopbackServer srv(*academy, dir / "metrics.jsonl");
    auto client = Client::connect("127.0.0.1", srv.server.port());
    Rng rng(8);
    auto out = client.reset(11);
    float running = 0.0f;
    for (int i = 0; i < 1000; ++i) {
      ActionMap m = zeros(out);
      for (auto& v : m["Basic"].values) v = static_cast<float>(rng.below(3));
      out = client.step(m);
      const auto& t = out.terminals.at("Basic");
      if (t.size() > 0) {
        running += t.rewards[0];
        client_returns.push_back(running);
        running = 0.0f;
      }
      const auto& d = out.decisions.at("Basic");
      if (d.size() > 0 && t.size() == 0) running += d.rewards[0];
    }
    client.close();
  }
  std::ifstream in(dir / "metrics.jsonl");
  std::vector<double> server_returns;
  for (std::string line; std::getline(in, line);) {
    const auto j = Json::parse(line);
    if (j.contains("mean_reward")) server_returns.push_back(j["mean_reward"].get<double>());
  }
  REQUIRE(client_returns.size() > 10);
  REQUIRE(server_returns.size() == client_returns.size());
  for (std::size_t i = 0; i < client_returns.size(); ++i) {
    CHECK(client_returns[i] == doctest::Approx(server_returns[i]).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("benchmark reports timing statistics") {
  const auto r = run_benchmark("Basic", 50, 1);
  CHECK(r.env == "Basic");
  CHECK(r.steps == 50);
  CHECK(r.num_agents == 1);
  CHECK(r.mean_ms > 0.0);
  CHECK(r.std_ms >= 0.0);
  const auto j = r.to_json();
  CHECK(j.contains("mean_ms"));
  CHECK(j.contains("std_ms"));
}
