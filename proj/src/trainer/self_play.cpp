#include "agentsim/trainer/self_play.hpp"

namespace agentsim::trainer {

void SnapshotPool::push(Snapshot s) {
  snapshots_.push_back(std::move(s));
  while (snapshots_.size() > window_) snapshots_.pop_front();
}

std::optional<std::size_t> select_opponent(const SnapshotPool& pool, double p_latest, Rng& rng) {
  if (pool.empty()) return std::nullopt;
  if (rng.uniform() < p_latest) return std::nullopt;
  return static_cast<std::size_t>(rng.below(pool.size()));
}

}  // namespace agentsim::trainer
