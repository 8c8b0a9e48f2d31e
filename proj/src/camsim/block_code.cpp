#include "abcauth/camsim/block_code.hpp"

#include <zlib.h>

#include <vector>

#include "abcauth/common/error.hpp"

namespace abcauth::camsim {
namespace {

constexpr int kHeaderBytes = 2 + 8;
constexpr int kCrcBytes = 4;

int block_count(int rows, int cols) { return (rows / kBlockSize) * (cols / kBlockSize); }

std::uint32_t crc_of(const std::vector<std::uint8_t>& bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, bytes.data(), static_cast<uInt>(bytes.size())));
}

}  // namespace

int code_capacity_bytes(int rows, int cols) {
  return block_count(rows, cols) / 8 - kHeaderBytes - kCrcBytes;
}

mathcore::ImagePlane encode_code(const QrPayload& payload, int rows, int cols) {
  if (payload.text.empty()) fail(ErrorCode::kConfigInvalid, "payload text must be non-empty");
  const int capacity = code_capacity_bytes(rows, cols);
  if (static_cast<int>(payload.text.size()) > capacity || payload.text.size() > 0xFFFF) {
    fail(ErrorCode::kPayloadTooLarge, "payload of " + std::to_string(payload.text.size()) +
                                          " bytes exceeds capacity " + std::to_string(capacity));
  }

  std::vector<std::uint8_t> bytes;
  const auto length = static_cast<std::uint16_t>(payload.text.size());
  bytes.push_back(static_cast<std::uint8_t>(length >> 8));
  bytes.push_back(static_cast<std::uint8_t>(length));
  const auto ts = static_cast<std::uint64_t>(payload.timestamp_ms);
  for (int shift = 56; shift >= 0; shift -= 8) bytes.push_back(static_cast<std::uint8_t>(ts >> shift));
  bytes.insert(bytes.end(), payload.text.begin(), payload.text.end());
  const std::uint32_t crc = crc_of(bytes);
  for (int shift = 24; shift >= 0; shift -= 8) bytes.push_back(static_cast<std::uint8_t>(crc >> shift));

  mathcore::ImagePlane plane(rows, cols, 0.0);
  const int blocks_per_row = cols / kBlockSize;
  for (std::size_t bit = 0; bit < bytes.size() * 8; ++bit) {
    if (((bytes[bit / 8] >> (7 - bit % 8)) & 1) == 0) continue;
    const int br = static_cast<int>(bit) / blocks_per_row;
    const int bc = static_cast<int>(bit) % blocks_per_row;
    for (int r = 0; r < kBlockSize; ++r) {
      for (int c = 0; c < kBlockSize; ++c) plane(br * kBlockSize + r, bc * kBlockSize + c) = kBlockHigh;
    }
  }
  return plane;
}

QrPayload decode_code(const mathcore::ImagePlane& plane) {
  const int blocks_per_row = plane.cols() / kBlockSize;
  const int total_bits = block_count(plane.rows(), plane.cols());
  auto read_bit = [&](int bit) {
    const int br = bit / blocks_per_row;
    const int bc = bit % blocks_per_row;
    double sum = 0.0;
    for (int r = 0; r < kBlockSize; ++r) {
      for (int c = 0; c < kBlockSize; ++c) sum += plane(br * kBlockSize + r, bc * kBlockSize + c);
    }
    return sum / (kBlockSize * kBlockSize) > kBlockHigh / 2.0 ? 1 : 0;
  };
  auto read_byte = [&](int index) {
    std::uint8_t b = 0;
    for (int k = 0; k < 8; ++k) b = static_cast<std::uint8_t>((b << 1) | read_bit(index * 8 + k));
    return b;
  };

  const int capacity = code_capacity_bytes(plane.rows(), plane.cols());
  if (capacity < 1) fail(ErrorCode::kChecksumFailure, "plane too small to hold a code");
  std::vector<std::uint8_t> bytes;
  for (int i = 0; i < kHeaderBytes; ++i) bytes.push_back(read_byte(i));
  const int length = (bytes[0] << 8) | bytes[1];
  if (length == 0 || length > capacity) fail(ErrorCode::kChecksumFailure, "code header is invalid");
  if ((kHeaderBytes + length + kCrcBytes) * 8 > total_bits) {
    fail(ErrorCode::kChecksumFailure, "code header is invalid");
  }
  for (int i = 0; i < length; ++i) bytes.push_back(read_byte(kHeaderBytes + i));
  std::uint32_t stored = 0;
  for (int i = 0; i < kCrcBytes; ++i) stored = (stored << 8) | read_byte(kHeaderBytes + length + i);
  if (stored != crc_of(bytes)) fail(ErrorCode::kChecksumFailure, "code checksum mismatch");

  QrPayload payload;
  std::uint64_t ts = 0;
  for (int i = 2; i < kHeaderBytes; ++i) ts = (ts << 8) | bytes[i];
  payload.timestamp_ms = static_cast<std::int64_t>(ts);
  payload.text.assign(bytes.begin() + kHeaderBytes, bytes.end());
  return payload;
}

}  // namespace abcauth::camsim
