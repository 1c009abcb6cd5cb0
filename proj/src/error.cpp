#include "mono3d/error.hpp"

namespace mono3d {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFieldCount: return "FieldCount";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kMissingP2: return "MissingP2";
    case ErrorCode::kDuplicate: return "Duplicate";
    case ErrorCode::kBehindCamera: return "BehindCamera";
    case ErrorCode::kMissingScore: return "MissingScore";
    case ErrorCode::kEmptyClassList: return "EmptyClassList";
    case ErrorCode::kEmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::kZeroFrequency: return "ZeroFrequency";
    case ErrorCode::kKeyMismatch: return "KeyMismatch";
    case ErrorCode::kFrameMismatch: return "FrameMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyPipeline: return "EmptyPipeline";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace mono3d
