#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace agentsim::kernel {

enum class Modality : std::uint8_t { kVector = 0, kRaycast = 1, kVisual = 2 };

// Shape of one observation before stacking. Raycast shape is
// [rays * (tags + 2)], visual shape is [H, W, 3].
struct ObservationSpec {
  Modality modality = Modality::kVector;
  std::vector<int> shape;
  int stack = 1;

  // Number of floats in one unstacked observation.
  std::size_t base_size() const;
  // Number of floats the agent actually receives (stack * base_size).
  std::size_t size() const { return base_size() * static_cast<std::size_t>(stack); }

  bool operator==(const ObservationSpec&) const = default;

  static ObservationSpec vector(int n, int stack = 1) {
    return {Modality::kVector, {n}, stack};
  }
  static ObservationSpec raycast(int rays, int tags, int stack = 1) {
    return {Modality::kRaycast, {rays * (tags + 2)}, stack};
  }
  static ObservationSpec visual(int height, int width, int stack = 1) {
    return {Modality::kVisual, {height, width, 3}, stack};
  }
};

enum class ActionKind : std::uint8_t { kDiscrete = 0, kContinuous = 1 };

struct ActionSpec {
  ActionKind kind = ActionKind::kDiscrete;
  // Discrete: one entry per branch. Unused for continuous actions.
  std::vector<int> branches;
  // Continuous: number of components, each in [-1, 1].
  int continuous_dim = 0;

  // Floats per action row: number of branches, or continuous_dim.
  std::size_t width() const;
  bool operator==(const ActionSpec&) const = default;

  static ActionSpec discrete(std::vector<int> branches) {
    return {ActionKind::kDiscrete, std::move(branches), 0};
  }
  static ActionSpec continuous(int dim) { return {ActionKind::kContinuous, {}, dim}; }
};

struct BehaviorSpec {
  std::string name;
  std::vector<ObservationSpec> observations;
  ActionSpec action;

  bool operator==(const BehaviorSpec&) const = default;
  // Same observation and action layout, ignoring the name.
  bool same_layout(const BehaviorSpec& other) const {
    return observations == other.observations && action == other.action;
  }
  std::size_t observation_size() const;
};

// Throws SpecMismatch when the spec breaks a structural invariant.
void validate(const BehaviorSpec& spec);

std::string describe(const ObservationSpec& spec);
std::string describe(const ActionSpec& spec);

}  // namespace agentsim::kernel
