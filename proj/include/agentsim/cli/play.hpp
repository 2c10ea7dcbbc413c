#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agentsim/kernel/academy.hpp"
#include "agentsim/protocol/recorder.hpp"
#include "json.hpp"

namespace agentsim::cli {

// Human play of one environment: the first agent follows client actions,
// the others their scripted expert (or no-op). Recording runs server-side.
class PlaySession {
 public:
  PlaySession(std::string env, std::map<std::string, double> params, std::uint64_t seed,
              std::filesystem::path record_path);

  nlohmann::json snapshot() const;

  // Client message {action: [...], record: bool}; both keys optional.
  // Raises ShapeMismatch for an action of the wrong width.
  void handle_message(const nlohmann::json& msg);

  // Advances to the controlled agent's next decision (or the next one of any
  // agent when it has none pending).
  void advance();

  // Stops recording and writes the demo if any records were taken.
  void finish();

  bool recording() const { return recording_; }
  std::size_t record_count() const { return recorder_.records().size(); }
  const std::optional<std::filesystem::path>& last_written() const { return last_written_; }
  std::size_t last_written_records() const { return last_written_records_; }
  kernel::AgentId controlled_agent() const { return agent_; }
  const kernel::Academy& academy() const { return *academy_; }

 private:
  void start_recording();
  void stop_recording();

  std::string env_;
  std::uint64_t seed_;
  std::filesystem::path record_path_;
  std::unique_ptr<kernel::Academy> academy_;
  bool has_expert_ = false;
  kernel::AgentId agent_ = -1;
  std::string behavior_;
  std::vector<float> action_;
  kernel::StepOutcome outcome_;
  protocol::DemoRecorder recorder_;
  bool recording_ = false;
  std::optional<std::filesystem::path> last_written_;
  std::size_t last_written_records_ = 0;
  std::map<kernel::AgentId, double> last_return_;
};

// Single-page UI served at "/" (index.html) and "/app.js".
const std::string& index_html();
const std::string& app_js();

struct PlayOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;  // 0 picks a free port
  // Decisions per second multiplier over the 10/s base; 0 runs in lockstep
  // with client messages.
  double speed = 1.0;
};

// HTTP + WebSocket bridge: static assets and ws://host:port/play.
class PlayServer {
 public:
  PlayServer(PlaySession& session, PlayOptions options);
  ~PlayServer();

  void bind();
  std::uint16_t port() const;
  // Serves clients one after another until `stop` is set.
  void serve(const std::atomic<bool>& stop);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace agentsim::cli
