#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace abcauth {

enum class ErrorCode {
  kDimensionMismatch,
  kDegenerateInput,
  kPayloadTooLarge,
  kChecksumFailure,
  kEmptyInput,
  kDuplicateDevice,
  kUnknownDevice,
  kUnknownSession,
  kChallengeExpired,
  kMalformedRow,
  kEmptyWindow,
  kTooFewSamples,
  kShapeMismatch,
  kDegenerateDataset,
  kEmptyPositives,
  kEmptyPool,
  kConfigInvalid,
  kNoThresholdSatisfies,
  kIoFailure,
  kFormatVersionMismatch,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above so the
// CLI can print a machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace abcauth
