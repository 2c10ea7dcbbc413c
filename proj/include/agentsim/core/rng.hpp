#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace agentsim {

// Counter-based generator. Output n is a SplitMix64 finalizer applied to
// key + n * golden, so a stream is fully described by (key, counter) and
// child streams are derived from a label without consuming parent output.
// All distributions are implemented here so that sequences are identical on
// every platform and standard library.
class Rng {
 public:
  Rng() : Rng(0) {}
  explicit Rng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc908ULL)) {}

  // Independent stream keyed by `label`; the parent is left untouched.
  Rng split(std::string_view label) const;
  Rng split(std::uint64_t index) const;

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t n);
  int uniform_int(int lo, int hi_inclusive);
  double normal();
  bool bernoulli(double p) { return uniform() < p; }
  // Index drawn proportionally to `weights` (non-negative, not all zero).
  std::size_t categorical(std::span<const double> weights);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix(std::uint64_t z);
  static std::uint64_t hash_label(std::string_view label);

 private:
  Rng(std::uint64_t key, int /*raw*/) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Seed from the operating system entropy source.
std::uint64_t entropy_seed();

}  // namespace agentsim
