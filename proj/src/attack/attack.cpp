#include "abcauth/attack/attack.hpp"

#include <vector>

#include "abcauth/camsim/block_code.hpp"
#include "abcauth/common/error.hpp"

namespace abcauth::attack {

using mathcore::ImagePlane;

std::string_view to_string(AttackScheme scheme) {
  return scheme == AttackScheme::kPrecomputed ? "precomputed" : "in_session";
}

AttackScheme attack_scheme_from_string(std::string_view text) {
  if (text == "precomputed") return AttackScheme::kPrecomputed;
  if (text == "in_session") return AttackScheme::kInSession;
  fail(ErrorCode::kConfigInvalid, "unknown attack scheme '" + std::string(text) + "'");
}

namespace {

prnu::CameraFingerprintEstimate blind_estimate(const camsim::CameraDevice& device, int photo_count,
                                               mathcore::RandomStream& rng, prnu::FingerprintSource source) {
  if (photo_count < 1) fail(ErrorCode::kConfigInvalid, "photo count must be positive");
  std::vector<ImagePlane> photos;
  photos.reserve(photo_count);
  for (int i = 0; i < photo_count; ++i) {
    const ImagePlane scene = camsim::natural_scene(device.rows(), device.cols(), rng);
    photos.push_back(device.capture(scene, rng));
  }
  return prnu::estimate_fingerprint(photos, {}, source);
}

// Code plane the attacker can re-render from what it reads off the photo.
ImagePlane readable_code(const ImagePlane& photo) {
  try {
    return camsim::encode_code(camsim::decode_code(photo), photo.rows(), photo.cols());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kChecksumFailure) throw;
    return {};
  }
}

}  // namespace

prnu::CameraFingerprintEstimate harvest_victim_fingerprint(const camsim::CameraDevice& victim, int photo_count,
                                                           mathcore::RandomStream& rng) {
  return blind_estimate(victim, photo_count, rng, prnu::FingerprintSource::kVictimSocialPhotos);
}

prnu::CameraFingerprintEstimate estimate_attacker_fingerprint(const camsim::CameraDevice& attacker,
                                                              int photo_count, mathcore::RandomStream& rng) {
  return blind_estimate(attacker, photo_count, rng, prnu::FingerprintSource::kAdversarySidePhotos);
}

std::array<ImagePlane, 2> forge_response(const AttackPlan& plan, const std::array<ImagePlane, 2>& presented,
                                         mathcore::RandomStream& rng) {
  const ImagePlane& k_victim = plan.victim_estimate.plane;
  std::array<ImagePlane, 2> out;
  for (int i = 0; i < 2; ++i) {
    mathcore::require_same_shape(presented[i], k_victim, "challenge plane vs victim estimate");
    ImagePlane photo = plan.attacker.capture(presented[i], rng);
    if (plan.scheme == AttackScheme::kPrecomputed) {
      mathcore::require_same_shape(plan.attacker_estimate.plane, k_victim, "attacker estimate");
      photo -= plan.attacker_estimate.plane;
    } else {
      const ImagePlane code = readable_code(photo);
      const ImagePlane remainder = code.empty() ? photo : photo - code;
      photo -= prnu::extract_residue(remainder).plane;
    }
    photo += k_victim;
    out[i] = std::move(photo);
  }
  return out;
}

}  // namespace abcauth::attack
