#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "agentsim/kernel/academy.hpp"
#include "json.hpp"

namespace agentsim::protocol {

using Json = nlohmann::json;

// Line-delimited JSON log. Each write is one compact object per line.
class MetricsLog {
 public:
  MetricsLog() = default;
  explicit MetricsLog(const std::filesystem::path& path) { open(path); }

  void open(const std::filesystem::path& path);
  bool is_open() const { return out_.is_open(); }
  void write(const Json& record);
  void flush() { out_.flush(); }
  void close() { out_.close(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

// {step, behavior, mean_reward, episode_len} for one finished episode.
Json episode_record(const kernel::EpisodeSummary& summary);

// Root directory for run output: $AGENTSIM_LOG_DIR when set, else `fallback`.
std::filesystem::path log_root(const std::filesystem::path& fallback = "runs");

}  // namespace agentsim::protocol
