#include "agentsim/cli/play.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>

#include "agentsim/core/error.hpp"
#include "agentsim/core/log.hpp"
#include "agentsim/envsuite/registry.hpp"
#include "agentsim/protocol/demo.hpp"

namespace agentsim::cli {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using Json = nlohmann::json;

namespace {

constexpr double kBaseDecisionsPerSecond = 10.0;

Json rgb(const sensors::Rgb& c) { return Json::array({c[0], c[1], c[2]}); }

Json action_spec_json(const kernel::ActionSpec& a) {
  if (a.kind == kernel::ActionKind::kDiscrete) return {{"kind", "discrete"}, {"branches", a.branches}};
  return {{"kind", "continuous"}, {"dim", a.continuous_dim}};
}

}  // namespace

PlaySession::PlaySession(std::string env, std::map<std::string, double> params,
                         std::uint64_t seed, std::filesystem::path record_path)
    : env_(std::move(env)),
      seed_(seed),
      record_path_(std::move(record_path)),
      academy_(envsuite::make_env(env_, params, seed)),
      recorder_(academy_->behaviors().front(), -1) {
  has_expert_ = academy_->environment().has_expert();
  behavior_ = academy_->behaviors().front().name;
  agent_ = academy_->agents_of(behavior_).front();
  recorder_ = protocol::DemoRecorder(academy_->behavior(behavior_), agent_);
  action_.assign(academy_->behavior(behavior_).action.width(), 0.0f);
  academy_->set_episode_listener(
      [this](const kernel::EpisodeSummary& e) { last_return_[e.agent_id] = e.episode_return; });
  outcome_ = academy_->reset(seed_);
}

Json PlaySession::snapshot() const {
  const auto& world = academy_->environment().world();
  const auto& palette = academy_->environment().palette();
  Json entities = Json::array();
  for (const auto& b : world.bodies()) {
    if (!b.enabled) continue;
    Json e{{"id", b.id}, {"tag", b.tag}, {"x", b.position.x}, {"y", b.position.y}, {"z", b.z_order}};
    if (const auto* box = std::get_if<worldsim::Aabb>(&b.shape)) {
      e["shape"] = "box";
      e["hx"] = box->half.x;
      e["hy"] = box->half.y;
    } else {
      e["shape"] = "circle";
      e["r"] = std::get<worldsim::Circle>(b.shape).radius;
    }
    entities.push_back(std::move(e));
  }
  Json agents = Json::array();
  for (const auto& h : academy_->agents()) {
    Json a{{"id", h.id},
           {"behavior", h.behavior_name},
           {"cumulative_reward", h.cumulative_reward},
           {"episode_step", h.episode_step},
           {"controlled", h.id == agent_},
           {"last_episode_return", nullptr}};
    if (auto it = last_return_.find(h.id); it != last_return_.end()) a["last_episode_return"] = it->second;
    agents.push_back(std::move(a));
  }
  Json colors = Json::object();
  for (const auto& [tag, c] : palette.colors) colors[tag] = rgb(c);
  const auto& bounds = world.bounds();
  return {{"env", env_},
          {"tick", academy_->step_count()},
          {"bounds", {{"min", {bounds.min.x, bounds.min.y}}, {"max", {bounds.max.x, bounds.max.y}}}},
          {"background", rgb(palette.background)},
          {"palette", colors},
          {"entities", entities},
          {"agents", agents},
          {"action_spec", action_spec_json(academy_->behavior(behavior_).action)},
          {"recording", recording_},
          {"records", record_count()}};
}

void PlaySession::handle_message(const Json& msg) {
  if (msg.contains("action")) {
    std::vector<float> a = msg.at("action").get<std::vector<float>>();
    if (a.size() != action_.size()) {
      throw Error(ErrorCode::kShapeMismatch, "action has " + std::to_string(a.size()) +
                                                 " values, expected " +
                                                 std::to_string(action_.size()));
    }
    action_ = std::move(a);
  }
  if (msg.contains("record")) {
    const bool on = msg.at("record").get<bool>();
    if (on && !recording_) start_recording();
    if (!on && recording_) stop_recording();
  }
}

void PlaySession::start_recording() {
  // Recording always covers whole episodes.
  outcome_ = academy_->reset(++seed_);
  recorder_.clear();
  recorder_.on_outcome(outcome_);
  recording_ = true;
}

void PlaySession::stop_recording() {
  recording_ = false;
  recorder_.discard_pending();
  if (recorder_.records().empty()) return;
  protocol::write_demo(record_path_, academy_->behavior(behavior_), recorder_.records());
  last_written_ = record_path_;
  last_written_records_ = recorder_.records().size();
  recorder_.clear();
}

void PlaySession::finish() {
  if (recording_) stop_recording();
}

void PlaySession::advance() {
  kernel::ActionMap actions;
  for (const auto& [name, batch] : outcome_.decisions) {
    auto& ab = actions[name];
    ab.agent_ids = batch.agent_ids;
    const std::size_t width = academy_->behavior(name).action.width();
    for (auto id : batch.agent_ids) {
      std::vector<float> a;
      if (id == agent_) {
        a = action_;
        if (recording_) recorder_.on_action(a);
      } else if (has_expert_) {
        a = academy_->environment().expert_action(*academy_, id);
      } else {
        a.assign(width, 0.0f);
      }
      ab.values.insert(ab.values.end(), a.begin(), a.end());
    }
  }
  outcome_ = academy_->step(actions);
  if (recording_) recorder_.on_outcome(outcome_);
}

// --- WebSocket bridge -------------------------------------------------------

struct PlayServer::Impl {
  PlaySession& session;
  PlayOptions options;
  asio::io_context ioc;
  tcp::acceptor acceptor{ioc};

  Impl(PlaySession& s, PlayOptions o) : session(s), options(std::move(o)) {}

  void serve_http(tcp::socket& sock, const http::request<http::string_body>& req) {
    http::response<http::string_body> res;
    res.version(req.version());
    res.keep_alive(false);
    const std::string target(req.target());
    if (target == "/" || target == "/index.html") {
      res.result(http::status::ok);
      res.set(http::field::content_type, "text/html; charset=utf-8");
      res.body() = index_html();
    } else if (target == "/app.js") {
      res.result(http::status::ok);
      res.set(http::field::content_type, "application/javascript");
      res.body() = app_js();
    } else {
      res.result(http::status::not_found);
      res.set(http::field::content_type, "text/plain");
      res.body() = "not found\n";
    }
    res.prepare_payload();
    beast::error_code ec;
    http::write(sock, res, ec);
    sock.shutdown(tcp::socket::shutdown_both, ec);
  }

  void play(websocket::stream<tcp::socket>& ws, const std::atomic<bool>& stop) {
    beast::flat_buffer buffer;
    bool closed = false;
    bool got = false;
    std::function<void()> start_read = [&] {
      ws.async_read(buffer, [&](beast::error_code ec, std::size_t) {
        if (ec) {
          closed = true;
          return;
        }
        try {
          session.handle_message(Json::parse(beast::buffers_to_string(buffer.data())));
        } catch (const std::exception& e) {
          log_warning(std::string("ignored client message: ") + e.what());
        }
        buffer.consume(buffer.size());
        got = true;
        start_read();
      });
    };
    start_read();

    const bool lockstep = options.speed <= 0.0;
    const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(lockstep ? 0.0 : 1.0 / (kBaseDecisionsPerSecond * options.speed)));
    while (!closed && !stop) {
      const std::string text = session.snapshot().dump();
      bool written = false;
      ws.async_write(asio::buffer(text), [&](beast::error_code ec, std::size_t) {
        if (ec) closed = true;
        written = true;
      });
      while (!written && !closed) {
        ioc.restart();
        ioc.run_one_for(std::chrono::milliseconds(100));
        if (stop) break;
      }
      if (closed || stop) break;
      if (lockstep) {
        while (!got && !closed && !stop) {
          ioc.restart();
          ioc.run_one_for(std::chrono::milliseconds(100));
        }
        if (!got) break;
        got = false;
      } else {
        const auto deadline = std::chrono::steady_clock::now() + period;
        while (std::chrono::steady_clock::now() < deadline && !closed && !stop) {
          ioc.restart();
          ioc.run_until(deadline);
        }
      }
      session.advance();
    }
    beast::error_code ec;
    if (!closed) ws.close(websocket::close_code::normal, ec);
    // Drain the pending read so the stream can be destroyed.
    ws.next_layer().close(ec);
    ioc.restart();
    ioc.run_for(std::chrono::milliseconds(50));
  }

  void handle(tcp::socket sock, const std::atomic<bool>& stop) {
    beast::flat_buffer buffer;
    http::request<http::string_body> req;
    beast::error_code ec;
    http::read(sock, buffer, req, ec);
    if (ec) return;
    if (!websocket::is_upgrade(req)) {
      serve_http(sock, req);
      return;
    }
    if (req.target() != "/play") {
      http::response<http::string_body> res{http::status::not_found, req.version()};
      res.body() = "websocket endpoint is /play\n";
      res.prepare_payload();
      http::write(sock, res, ec);
      return;
    }
    websocket::stream<tcp::socket> ws(std::move(sock));
    ws.text(true);
    ws.accept(req, ec);
    if (ec) return;
    play(ws, stop);
  }
};

PlayServer::PlayServer(PlaySession& session, PlayOptions options)
    : impl_(std::make_unique<Impl>(session, std::move(options))) {}

PlayServer::~PlayServer() = default;

void PlayServer::bind() {
  tcp::endpoint ep(asio::ip::make_address(impl_->options.host), impl_->options.port);
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen();
}

std::uint16_t PlayServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void PlayServer::serve(const std::atomic<bool>& stop) {
  auto& ioc = impl_->ioc;
  while (!stop) {
    std::optional<tcp::socket> accepted;
    impl_->acceptor.async_accept([&](beast::error_code ec, tcp::socket s) {
      if (!ec) accepted.emplace(std::move(s));
    });
    while (!accepted && !stop) {
      ioc.restart();
      ioc.run_for(std::chrono::milliseconds(100));
    }
    if (!accepted) {
      beast::error_code ec;
      impl_->acceptor.cancel(ec);
      ioc.restart();
      ioc.run_for(std::chrono::milliseconds(10));
      break;
    }
    impl_->handle(std::move(*accepted), stop);
  }
  impl_->session.finish();
}

}  // namespace agentsim::cli
