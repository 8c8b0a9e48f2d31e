#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "abcauth/mathcore/image_plane.hpp"

namespace abcauth::mathcore {

// Seeded draw sequence. Identical (seed, algorithm) pairs replay identically;
// derive() splits independent child streams off a master seed by label so that
// per-device and per-session randomness does not depend on execution order.
class RandomStream {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64";

  explicit RandomStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::string_view algorithm() const noexcept { return kAlgorithm; }

  RandomStream derive(std::string_view label) const;

  std::uint64_t next_u64() { return engine_(); }
  double uniform(double lo = 0.0, double hi = 1.0);
  int uniform_int(int lo, int hi);  // inclusive bounds
  double normal(double mean = 0.0, double stddev = 1.0);
  bool bernoulli(double p);

  ImagePlane gaussian_plane(int rows, int cols, double stddev);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text);

}  // namespace abcauth::mathcore
