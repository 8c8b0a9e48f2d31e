#include "abcauth/common/error.hpp"

namespace abcauth {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kPayloadTooLarge: return "PayloadTooLarge";
    case ErrorCode::kChecksumFailure: return "ChecksumFailure";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kDuplicateDevice: return "DuplicateDevice";
    case ErrorCode::kUnknownDevice: return "UnknownDevice";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kChallengeExpired: return "ChallengeExpired";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kEmptyWindow: return "EmptyWindow";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kDegenerateDataset: return "DegenerateDataset";
    case ErrorCode::kEmptyPositives: return "EmptyPositives";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kNoThresholdSatisfies: return "NoThresholdSatisfies";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kFormatVersionMismatch: return "FormatVersionMismatch";
  }
  return "Unknown";
}

}  // namespace abcauth
