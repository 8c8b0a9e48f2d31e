#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "abcauth/mathcore/image_plane.hpp"

namespace abcauth::prnu {

enum class FingerprintSource { kRegistration, kAdversarySidePhotos, kVictimSocialPhotos };

std::string_view to_string(FingerprintSource source);
FingerprintSource fingerprint_source_from_string(std::string_view text);

struct NoiseResidue {
  mathcore::ImagePlane plane;  // zero mean
  std::string source_id;
};

struct CameraFingerprintEstimate {
  mathcore::ImagePlane plane;
  int image_count = 0;
  FingerprintSource source = FingerprintSource::kRegistration;
};

// Replaceable low-pass used by the blind residue path.
using Denoiser = std::function<mathcore::ImagePlane(const mathcore::ImagePlane&)>;

// Separable Gaussian blur, sigma 1, five taps, mirrored borders (edge sample
// repeated). Reproduces constant planes exactly.
mathcore::ImagePlane gaussian_denoise(const mathcore::ImagePlane& image);

// Blind path: image - denoise(image), mean removed.
NoiseResidue extract_residue(const mathcore::ImagePlane& image, const Denoiser& denoiser = gaussian_denoise,
                             std::string source_id = {});

// Known-scene path: image - scene_hint, mean removed.
NoiseResidue extract_residue(const mathcore::ImagePlane& image, const mathcore::ImagePlane& scene_hint,
                             std::string source_id = {});

// Mean of the residues of all images. When `scene_hints` is non-empty it must
// pair one hint with every image; otherwise the blind path is used.
CameraFingerprintEstimate estimate_fingerprint(std::span<const mathcore::ImagePlane> images,
                                               std::span<const mathcore::ImagePlane> scene_hints,
                                               FingerprintSource source,
                                               const Denoiser& denoiser = gaussian_denoise);

}  // namespace abcauth::prnu
