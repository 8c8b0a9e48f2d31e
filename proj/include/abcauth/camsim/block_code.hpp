#pragma once

#include <cstdint>
#include <string>

#include "abcauth/mathcore/image_plane.hpp"

namespace abcauth::camsim {

struct QrPayload {
  std::string text;
  std::int64_t timestamp_ms = 0;

  friend bool operator==(const QrPayload&, const QrPayload&) = default;
};

// Binary block code standing in for a QR symbol. Each 4x4 pixel block carries
// one bit (0 -> black, 1 -> 255), filled row-major from the top-left block:
//
//   u16 text length | i64 timestamp | text bytes | u32 CRC-32 of the preceding
//
// all big-endian, most significant bit first.
inline constexpr int kBlockSize = 4;
inline constexpr double kBlockHigh = 255.0;

// Largest text that fits a plane of this size.
int code_capacity_bytes(int rows, int cols);

// Throws PayloadTooLarge, or ConfigInvalid for an empty payload text.
mathcore::ImagePlane encode_code(const QrPayload& payload, int rows, int cols);

// Thresholds every block mean at the mid level. Throws ChecksumFailure when the
// header is implausible or the CRC does not match.
QrPayload decode_code(const mathcore::ImagePlane& plane);

}  // namespace abcauth::camsim
