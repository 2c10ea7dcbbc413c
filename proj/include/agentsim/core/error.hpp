#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace agentsim {

// Every failure the library reports carries one of these codes. The numeric
// values double as the wire-level code of an Error frame.
enum class ErrorCode : std::uint16_t {
  kInternal = 0,
  kVersionMismatch = 1,
  kUnknownType = 2,
  kMalformedBody = 3,
  kTruncated = 4,
  kProtocolOrderViolation = 5,
  kMissingAction = 6,
  kUnknownBehavior = 7,
  kActionShapeMismatch = 8,
  kSpecMismatch = 9,
  kInactiveAgent = 10,
  kNonFiniteParameter = 11,
  kUnknownEnvironment = 12,
  kNoScriptedExpert = 13,
  kBadMagic = 14,
  kVersionUnsupported = 15,
  kShapeMismatch = 16,
  kLengthMismatch = 17,
  kNonFiniteLoss = 18,
  kEmptyBatch = 19,
  kInvalidConfig = 20,
  kIo = 21,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace agentsim
