#include "abcauth/mathcore/random_stream.hpp"

namespace abcauth::mathcore {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RandomStream RandomStream::derive(std::string_view label) const {
  return RandomStream(splitmix64(seed_ ^ splitmix64(fnv1a64(label))));
}

double RandomStream::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

int RandomStream::uniform_int(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(engine_);
}

double RandomStream::normal(double mean, double stddev) { return mean + stddev * normal_(engine_); }

bool RandomStream::bernoulli(double p) { return uniform() < p; }

ImagePlane RandomStream::gaussian_plane(int rows, int cols, double stddev) {
  ImagePlane plane(rows, cols);
  for (double& v : plane.values()) v = stddev * normal_(engine_);
  return plane;
}

}  // namespace abcauth::mathcore
