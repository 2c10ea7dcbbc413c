#include "agentsim/envsuite/common.hpp"

#include <algorithm>
#include <sstream>

#include "agentsim/core/log.hpp"

namespace agentsim::envsuite {

double read_param(const Academy& academy, const ParamDef& def) {
  const double raw = academy.parameter(def.name, def.default_value);
  const double clamped = std::clamp(raw, def.min, def.max);
  if (clamped != raw) {
    std::ostringstream os;
    os << "parameter '" << def.name << "' = " << raw << " outside [" << def.min << ", "
       << def.max << "], clamped to " << clamped;
    log_warning(os.str());
  }
  return clamped;
}

Vec2 move_direction(int action) {
  switch (action) {
    case 1: return {-1.0, 0.0};
    case 2: return {1.0, 0.0};
    case 3: return {0.0, 1.0};
    case 4: return {0.0, -1.0};
    default: return {0.0, 0.0};
  }
}

void WorldEnvironment::add_walls(const worldsim::Bounds& inner, double t, const std::string& tag) {
  const double w = inner.width();
  const double h = inner.height();
  const Vec2 c{(inner.min.x + inner.max.x) / 2, (inner.min.y + inner.max.y) / 2};
  world_.add_body({.tag = tag, .shape = worldsim::Aabb{{w / 2 + t, t / 2}},
                   .position = {c.x, inner.min.y - t / 2}});
  world_.add_body({.tag = tag, .shape = worldsim::Aabb{{w / 2 + t, t / 2}},
                   .position = {c.x, inner.max.y + t / 2}});
  world_.add_body({.tag = tag, .shape = worldsim::Aabb{{t / 2, h / 2}},
                   .position = {inner.min.x - t / 2, c.y}});
  world_.add_body({.tag = tag, .shape = worldsim::Aabb{{t / 2, h / 2}},
                   .position = {inner.max.x + t / 2, c.y}});
}

}  // namespace agentsim::envsuite
