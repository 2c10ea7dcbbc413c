#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "agentsim/core/rng.hpp"

namespace agentsim::trainer {

struct Snapshot {
  std::vector<float> params;
  double elo = 0.0;
  std::uint64_t step = 0;
};

// Most recent `window` frozen copies of a policy.
class SnapshotPool {
 public:
  explicit SnapshotPool(std::size_t window) : window_(window) {}

  void push(Snapshot s);
  std::size_t size() const { return snapshots_.size(); }
  bool empty() const { return snapshots_.empty(); }
  std::size_t window() const { return window_; }
  Snapshot& at(std::size_t i) { return snapshots_.at(i); }
  const Snapshot& at(std::size_t i) const { return snapshots_.at(i); }

 private:
  std::size_t window_;
  std::deque<Snapshot> snapshots_;
};

// Opponent for the next episode: nullopt means the current policy (always
// the case for an empty pool), otherwise an index into the pool drawn
// uniformly. The current policy is chosen with probability p_latest.
std::optional<std::size_t> select_opponent(const SnapshotPool& pool, double p_latest, Rng& rng);

}  // namespace agentsim::trainer
