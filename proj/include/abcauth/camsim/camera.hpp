#pragma once

#include <cstdint>
#include <string>

#include "abcauth/mathcore/image_plane.hpp"
#include "abcauth/mathcore/random_stream.hpp"

namespace abcauth::camsim {

inline constexpr double kDefaultFingerprintSigma = 2.0;
inline constexpr double kDefaultProbeSigma = 2.0;
inline constexpr double kDefaultShotSigma = 4.0;

struct CaptureOptions {
  bool quantize_8bit = false;  // round and clamp to [0, 255]
};

// Synthetic camera under the additive model: photo = scene + K + shot noise.
class CameraDevice {
 public:
  // K is drawn i.i.d. N(0, sigma_fingerprint^2) from a stream derived from the
  // seed, so (id, seed) reproduces the device exactly.
  static CameraDevice create(std::string id, int rows, int cols, std::uint64_t seed,
                             double sigma_fingerprint = kDefaultFingerprintSigma,
                             double sigma_shot = kDefaultShotSigma);

  CameraDevice(std::string id, mathcore::ImagePlane fingerprint, double sigma_shot, std::uint64_t seed);

  const std::string& id() const noexcept { return id_; }
  const mathcore::ImagePlane& fingerprint() const noexcept { return fingerprint_; }
  double sigma_shot() const noexcept { return sigma_shot_; }
  std::uint64_t seed() const noexcept { return seed_; }
  int rows() const noexcept { return fingerprint_.rows(); }
  int cols() const noexcept { return fingerprint_.cols(); }

  // Draws shot noise from the device's own stream.
  mathcore::ImagePlane capture(const mathcore::ImagePlane& scene, CaptureOptions options = {});
  // Draws shot noise from a caller-owned stream (used for order-independent batches).
  mathcore::ImagePlane capture(const mathcore::ImagePlane& scene, mathcore::RandomStream& rng,
                               CaptureOptions options = {}) const;

 private:
  std::string id_;
  mathcore::ImagePlane fingerprint_;
  double sigma_shot_;
  std::uint64_t seed_;
  mathcore::RandomStream shots_;
};

struct ProbeSignal {
  std::string id;
  mathcore::ImagePlane plane;

  static ProbeSignal generate(std::string id, int rows, int cols, double sigma, mathcore::RandomStream& rng);
};

// Stand-in for an everyday photo: smooth intensity gradient, a low-frequency
// undulation and faint white texture.
mathcore::ImagePlane natural_scene(int rows, int cols, mathcore::RandomStream& rng);

}  // namespace abcauth::camsim
