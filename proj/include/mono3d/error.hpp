#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mono3d {

enum class ErrorCode {
  kFieldCount,
  kParse,
  kMissingP2,
  kDuplicate,
  kBehindCamera,
  kMissingScore,
  kEmptyClassList,
  kEmptyGroundTruth,
  kZeroFrequency,
  kKeyMismatch,
  kFrameMismatch,
  kDimensionMismatch,
  kEmptyPipeline,
  kEmptyPool,
  kInvalidConfig,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// All library failures surface as this type; `code()` carries the category
// so callers (the CLI, bindings) can map it without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mono3d
