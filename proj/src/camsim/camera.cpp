#include "abcauth/camsim/camera.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "abcauth/common/error.hpp"

namespace abcauth::camsim {

using mathcore::ImagePlane;
using mathcore::RandomStream;

CameraDevice CameraDevice::create(std::string id, int rows, int cols, std::uint64_t seed,
                                  double sigma_fingerprint, double sigma_shot) {
  RandomStream root(seed);
  RandomStream k_stream = root.derive("fingerprint");
  ImagePlane k = k_stream.gaussian_plane(rows, cols, sigma_fingerprint);
  return CameraDevice(std::move(id), std::move(k), sigma_shot, seed);
}

CameraDevice::CameraDevice(std::string id, ImagePlane fingerprint, double sigma_shot, std::uint64_t seed)
    : id_(std::move(id)),
      fingerprint_(std::move(fingerprint)),
      sigma_shot_(sigma_shot),
      seed_(seed),
      shots_(RandomStream(seed).derive("shots")) {
  if (sigma_shot < 0.0) fail(ErrorCode::kConfigInvalid, "shot noise sigma must be non-negative");
}

ImagePlane CameraDevice::capture(const ImagePlane& scene, CaptureOptions options) {
  return capture(scene, shots_, options);
}

ImagePlane CameraDevice::capture(const ImagePlane& scene, RandomStream& rng, CaptureOptions options) const {
  mathcore::require_same_shape(scene, fingerprint_, "capture");
  ImagePlane out = scene;
  out += fingerprint_;
  if (sigma_shot_ > 0.0) {
    for (double& v : out.values()) v += rng.normal(0.0, sigma_shot_);
  }
  if (options.quantize_8bit) {
    for (double& v : out.values()) v = std::clamp(std::round(v), 0.0, 255.0);
  }
  return out;
}

ProbeSignal ProbeSignal::generate(std::string id, int rows, int cols, double sigma, RandomStream& rng) {
  return ProbeSignal{std::move(id), rng.gaussian_plane(rows, cols, sigma)};
}

ImagePlane natural_scene(int rows, int cols, RandomStream& rng) {
  const double base = rng.uniform(50.0, 200.0);
  const double gx = rng.uniform(-0.5, 0.5);
  const double gy = rng.uniform(-0.5, 0.5);
  const double amplitude = rng.uniform(5.0, 20.0);
  const double fx = rng.uniform(0.005, 0.03);
  const double fy = rng.uniform(0.005, 0.03);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  ImagePlane scene(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      scene(r, c) = base + gx * c + gy * r +
                    amplitude * std::sin(2.0 * std::numbers::pi * (fx * c + fy * r) + phase) +
                    rng.normal(0.0, 1.0);
    }
  }
  return scene;
}

}  // namespace abcauth::camsim
