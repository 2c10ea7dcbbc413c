#pragma once

#include <iostream>
#include <string_view>

namespace agentsim {

inline bool& warnings_enabled() {
  static bool enabled = true;
  return enabled;
}

inline void log_warning(std::string_view message) {
  if (warnings_enabled()) std::cerr << "[agentsim] warning: " << message << '\n';
}

}  // namespace agentsim
