#include "agentsim/protocol/metrics.hpp"

#include <cstdlib>

#include "agentsim/core/error.hpp"

namespace agentsim::protocol {

void MetricsLog::open(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::out | std::ios::trunc);
  if (!out_) throw Error(ErrorCode::kIo, "cannot open metrics log " + path.string());
  path_ = path;
}

void MetricsLog::write(const Json& record) {
  if (!out_.is_open()) return;
  out_ << record.dump() << '\n';
}

Json episode_record(const kernel::EpisodeSummary& s) {
  return Json{{"step", s.step_count},
              {"behavior", s.behavior_name},
              {"agent_id", s.agent_id},
              {"mean_reward", s.episode_return},
              {"episode_len", s.episode_length},
              {"interrupted", s.interrupted}};
}

std::filesystem::path log_root(const std::filesystem::path& fallback) {
  if (const char* dir = std::getenv("AGENTSIM_LOG_DIR"); dir && *dir) return dir;
  return fallback;
}

}  // namespace agentsim::protocol
