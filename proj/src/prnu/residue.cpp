#include "abcauth/prnu/residue.hpp"

#include <array>
#include <cmath>

#include "abcauth/common/error.hpp"

namespace abcauth::prnu {

using mathcore::ImagePlane;

std::string_view to_string(FingerprintSource source) {
  switch (source) {
    case FingerprintSource::kRegistration: return "registration";
    case FingerprintSource::kAdversarySidePhotos: return "adversary-side-photos";
    case FingerprintSource::kVictimSocialPhotos: return "victim-social-photos";
  }
  return "registration";
}

FingerprintSource fingerprint_source_from_string(std::string_view text) {
  if (text == "registration") return FingerprintSource::kRegistration;
  if (text == "adversary-side-photos") return FingerprintSource::kAdversarySidePhotos;
  if (text == "victim-social-photos") return FingerprintSource::kVictimSocialPhotos;
  fail(ErrorCode::kIoFailure, "unknown fingerprint source '" + std::string(text) + "'");
}

namespace {

std::array<double, 5> gaussian_taps() {
  std::array<double, 5> taps{};
  double sum = 0.0;
  for (int k = -2; k <= 2; ++k) {
    taps[k + 2] = std::exp(-0.5 * k * k);
    sum += taps[k + 2];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Mirror index into [0, n) repeating the edge sample: -1 -> 0, n -> n-1.
int mirror(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

}  // namespace

ImagePlane gaussian_denoise(const ImagePlane& image) {
  static const auto taps = gaussian_taps();
  const int rows = image.rows();
  const int cols = image.cols();
  ImagePlane horizontal(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) acc += taps[k + 2] * image(r, mirror(c + k, cols));
      horizontal(r, c) = acc;
    }
  }
  ImagePlane out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) acc += taps[k + 2] * horizontal(mirror(r + k, rows), c);
      out(r, c) = acc;
    }
  }
  return out;
}

NoiseResidue extract_residue(const ImagePlane& image, const Denoiser& denoiser, std::string source_id) {
  ImagePlane residue = image - denoiser(image);
  return NoiseResidue{residue.centered(), std::move(source_id)};
}

NoiseResidue extract_residue(const ImagePlane& image, const ImagePlane& scene_hint, std::string source_id) {
  mathcore::require_same_shape(image, scene_hint, "residue scene hint");
  ImagePlane residue = image - scene_hint;
  return NoiseResidue{residue.centered(), std::move(source_id)};
}

CameraFingerprintEstimate estimate_fingerprint(std::span<const ImagePlane> images,
                                               std::span<const ImagePlane> scene_hints,
                                               FingerprintSource source, const Denoiser& denoiser) {
  if (images.empty()) fail(ErrorCode::kEmptyInput, "fingerprint estimation needs at least one image");
  if (!scene_hints.empty() && scene_hints.size() != images.size()) {
    fail(ErrorCode::kDimensionMismatch, "one scene hint per image is required");
  }
  ImagePlane sum(images.front().rows(), images.front().cols(), 0.0);
  for (std::size_t i = 0; i < images.size(); ++i) {
    mathcore::require_same_shape(images[i], sum, "fingerprint estimation");
    const NoiseResidue residue =
        scene_hints.empty() ? extract_residue(images[i], denoiser) : extract_residue(images[i], scene_hints[i]);
    sum += residue.plane;
  }
  sum *= 1.0 / static_cast<double>(images.size());
  return CameraFingerprintEstimate{std::move(sum), static_cast<int>(images.size()), source};
}

}  // namespace abcauth::prnu
