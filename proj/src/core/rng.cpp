#include "agentsim/core/rng.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "agentsim/core/error.hpp"

namespace agentsim {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInternal: return "Internal";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kUnknownType: return "UnknownType";
    case ErrorCode::kMalformedBody: return "MalformedBody";
    case ErrorCode::kTruncated: return "Truncated";
    case ErrorCode::kProtocolOrderViolation: return "ProtocolOrderViolation";
    case ErrorCode::kMissingAction: return "MissingAction";
    case ErrorCode::kUnknownBehavior: return "UnknownBehavior";
    case ErrorCode::kActionShapeMismatch: return "ActionShapeMismatch";
    case ErrorCode::kSpecMismatch: return "SpecMismatch";
    case ErrorCode::kInactiveAgent: return "InactiveAgent";
    case ErrorCode::kNonFiniteParameter: return "NonFiniteParameter";
    case ErrorCode::kUnknownEnvironment: return "UnknownEnvironment";
    case ErrorCode::kNoScriptedExpert: return "NoScriptedExpert";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kVersionUnsupported: return "VersionUnsupported";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kEmptyBatch: return "EmptyBatch";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

std::uint64_t Rng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::hash_label(std::string_view label) {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng Rng::split(std::string_view label) const {
  return Rng(mix(key_ ^ mix(hash_label(label))), 0);
}

Rng Rng::split(std::uint64_t index) const {
  return Rng(mix(key_ ^ mix(index + kGolden)), 0);
}

std::uint64_t Rng::next_u64() {
  ++counter_;
  return mix(key_ + counter_ * kGolden);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kInternal, "Rng::below(0)");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

int Rng::uniform_int(int lo, int hi_inclusive) {
  const auto span = static_cast<std::uint64_t>(
      static_cast<std::int64_t>(hi_inclusive) - lo + 1);
  return lo + static_cast<int>(below(span));
}

double Rng::normal() {
  // Box-Muller; one draw per call keeps the counter arithmetic simple.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  // Rounding can leave u marginally above the last bucket.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return 0;
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace agentsim
