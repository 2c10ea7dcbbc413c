#include "agentsim/kernel/spec.hpp"

#include <numeric>
#include <sstream>

#include "agentsim/core/error.hpp"

namespace agentsim::kernel {

std::size_t ObservationSpec::base_size() const {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  return shape.empty() ? 0 : n;
}

std::size_t ActionSpec::width() const {
  return kind == ActionKind::kDiscrete ? branches.size()
                                       : static_cast<std::size_t>(continuous_dim);
}

std::size_t BehaviorSpec::observation_size() const {
  std::size_t n = 0;
  for (const auto& o : observations) n += o.size();
  return n;
}

void validate(const BehaviorSpec& spec) {
  if (spec.name.empty()) throw Error(ErrorCode::kSpecMismatch, "empty behavior name");
  if (spec.observations.empty()) {
    throw Error(ErrorCode::kSpecMismatch, spec.name + ": no observation specs");
  }
  for (const auto& o : spec.observations) {
    if (o.shape.empty() || o.stack < 1) {
      throw Error(ErrorCode::kSpecMismatch, spec.name + ": bad observation " + describe(o));
    }
    for (int d : o.shape) {
      if (d <= 0) throw Error(ErrorCode::kSpecMismatch, spec.name + ": non-positive dim");
    }
    if (o.modality == Modality::kVisual && (o.shape.size() != 3 || o.shape[2] != 3)) {
      throw Error(ErrorCode::kSpecMismatch, spec.name + ": visual shape must be [H,W,3]");
    }
  }
  if (spec.action.kind == ActionKind::kDiscrete) {
    if (spec.action.branches.empty()) {
      throw Error(ErrorCode::kSpecMismatch, spec.name + ": discrete action without branches");
    }
    for (int b : spec.action.branches) {
      if (b < 1) throw Error(ErrorCode::kSpecMismatch, spec.name + ": branch size < 1");
    }
  } else if (spec.action.continuous_dim < 1) {
    throw Error(ErrorCode::kSpecMismatch, spec.name + ": continuous dim < 1");
  }
}

std::string describe(const ObservationSpec& spec) {
  std::ostringstream os;
  switch (spec.modality) {
    case Modality::kVector: os << "Vector"; break;
    case Modality::kRaycast: os << "Raycast"; break;
    case Modality::kVisual: os << "Visual"; break;
  }
  os << '(';
  for (std::size_t i = 0; i < spec.shape.size(); ++i) {
    if (i) os << 'x';
    os << spec.shape[i];
  }
  os << ')';
  if (spec.stack > 1) os << "x" << spec.stack << " stacked";
  return os.str();
}

std::string describe(const ActionSpec& spec) {
  std::ostringstream os;
  if (spec.kind == ActionKind::kDiscrete) {
    os << "Discrete([";
    for (std::size_t i = 0; i < spec.branches.size(); ++i) {
      if (i) os << ',';
      os << spec.branches[i];
    }
    os << "])";
  } else {
    os << "Continuous(" << spec.continuous_dim << ')';
  }
  return os.str();
}

}  // namespace agentsim::kernel
