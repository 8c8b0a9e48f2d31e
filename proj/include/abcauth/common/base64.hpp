#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace abcauth {

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Little-endian IEEE-754 binary64 packing for matrix payloads.
std::string encode_doubles(std::span<const double> values);
std::vector<double> decode_doubles(std::string_view text);

}  // namespace abcauth
