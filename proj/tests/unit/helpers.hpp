#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "agentsim/core/error.hpp"

#define CHECK_ERROR_CODE(expr, expected)                              \
  do {                                                                \
    bool caught_ = false;                                             \
    try {                                                             \
      (void)(expr);                                                   \
    } catch (const ::agentsim::Error& e_) {                           \
      caught_ = true;                                                 \
      CHECK_MESSAGE(e_.code() == (expected), e_.what());              \
    }                                                                 \
    CHECK_MESSAGE(caught_, "expected an agentsim::Error from " #expr); \
  } while (0)

namespace testing {

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("agentsim_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
