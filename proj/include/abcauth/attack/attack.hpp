#pragma once

#include <array>
#include <string_view>

#include "abcauth/camsim/camera.hpp"
#include "abcauth/mathcore/image_plane.hpp"
#include "abcauth/mathcore/random_stream.hpp"
#include "abcauth/prnu/residue.hpp"

namespace abcauth::attack {

enum class AttackScheme { kPrecomputed, kInSession };

std::string_view to_string(AttackScheme scheme);
AttackScheme attack_scheme_from_string(std::string_view text);

inline constexpr int kDefaultSidePhotoCount = 5;

struct AttackPlan {
  camsim::CameraDevice attacker;
  prnu::CameraFingerprintEstimate victim_estimate;
  // Built from the attacker's own non-challenge photos. Unused by the
  // in-session scheme, which works from the challenge photos alone.
  prnu::CameraFingerprintEstimate attacker_estimate;
  AttackScheme scheme = AttackScheme::kPrecomputed;
};

// Victim photos of everyday scenes (as posted online), estimated blind.
prnu::CameraFingerprintEstimate harvest_victim_fingerprint(const camsim::CameraDevice& victim, int photo_count,
                                                           mathcore::RandomStream& rng);

// The attacker's estimate of their own camera from side photos.
prnu::CameraFingerprintEstimate estimate_attacker_fingerprint(const camsim::CameraDevice& attacker,
                                                              int photo_count, mathcore::RandomStream& rng);

// Only the planes shown to the user are visible here; probes and session state
// stay on the verifier side.
//
// precomputed: photograph each plane, then I - K_attacker_est + K_victim_est.
// in_session:  photograph each plane, read its code, re-render it, and strip
//              the blind residue of the code-free remainder before adding
//              K_victim_est. The probe's high band goes with it.
std::array<mathcore::ImagePlane, 2> forge_response(const AttackPlan& plan,
                                                   const std::array<mathcore::ImagePlane, 2>& presented,
                                                   mathcore::RandomStream& rng);

}  // namespace abcauth::attack
