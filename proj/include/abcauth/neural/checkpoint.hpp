#pragma once

#include <filesystem>
#include <iosfwd>

#include "abcauth/neural/models.hpp"

namespace abcauth::neural {

// Layout, all integers little-endian:
//
//   8 bytes  magic "ABCNNCK\0"
//   u32      version (1)
//   u32      descriptor length L
//   L bytes  descriptor (ModelSpec::descriptor(), UTF-8 JSON)
//   u64      parameter count P
//   P x f64  parameters, little-endian IEEE-754, tensors in layer order,
//            each tensor column-major
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(Network<float>& net, std::ostream& out);
void save_checkpoint(Network<float>& net, const std::filesystem::path& path);
// Throws FormatVersionMismatch on a bad magic/version/descriptor, IoFailure
// on truncation.
Network<float> load_checkpoint(std::istream& in);
Network<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace abcauth::neural
