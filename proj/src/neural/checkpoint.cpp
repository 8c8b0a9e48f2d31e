#include "abcauth/neural/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "abcauth/common/error.hpp"

namespace abcauth::neural {

namespace {

constexpr std::array<char, 8> kMagic = {'A', 'B', 'C', 'N', 'N', 'C', 'K', '\0'};

template <class U>
void put(std::ostream& out, U value) {
  unsigned char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(buf), sizeof buf);
}

template <class U>
U get(std::istream& in) {
  unsigned char buf[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof buf)) fail(ErrorCode::kIoFailure, "checkpoint truncated");
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(buf[i]) << (8 * i);
  return value;
}

}  // namespace

void save_checkpoint(Network<float>& net, std::ostream& out) {
  const std::string desc = net.spec().descriptor();
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(desc.size()));
  out.write(desc.data(), static_cast<std::streamsize>(desc.size()));
  put<std::uint64_t>(out, net.parameter_count());
  for (Param<float>* p : net.params()) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      put<std::uint64_t>(out, std::bit_cast<std::uint64_t>(static_cast<double>(p->value.data()[i])));
    }
  }
  if (!out) fail(ErrorCode::kIoFailure, "checkpoint write failed");
}

void save_checkpoint(Network<float>& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoFailure, "cannot open " + path.string());
  save_checkpoint(net, out);
}

Network<float> load_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size())) fail(ErrorCode::kIoFailure, "checkpoint truncated");
  if (magic != kMagic) fail(ErrorCode::kFormatVersionMismatch, "not a model checkpoint");
  const auto version = get<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    fail(ErrorCode::kFormatVersionMismatch, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto len = get<std::uint32_t>(in);
  std::string desc(len, '\0');
  if (!in.read(desc.data(), len)) fail(ErrorCode::kIoFailure, "checkpoint truncated");
  Network<float> net(ModelSpec::from_descriptor(desc));
  const auto count = get<std::uint64_t>(in);
  if (count != net.parameter_count()) {
    fail(ErrorCode::kFormatVersionMismatch, "parameter count does not match the descriptor");
  }
  for (Param<float>* p : net.params()) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      p->value.data()[i] = static_cast<float>(std::bit_cast<double>(get<std::uint64_t>(in)));
    }
  }
  return net;
}

Network<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoFailure, "cannot open " + path.string());
  return load_checkpoint(in);
}

}  // namespace abcauth::neural
