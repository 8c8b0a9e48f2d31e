#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "abcauth/camsim/block_code.hpp"
#include "abcauth/camsim/camera.hpp"
#include "abcauth/mathcore/random_stream.hpp"
#include "abcauth/protocol/profile.hpp"

namespace abcauth::protocol {

class SessionLog;

struct Challenge {
  std::string session_id;
  std::int64_t issued_ms = 0;
  std::array<camsim::QrPayload, 2> payloads;
  std::array<mathcore::ImagePlane, 2> codes;   // encoded payloads
  std::array<camsim::ProbeSignal, 2> probes;
  std::array<mathcore::ImagePlane, 2> planes;  // code + probe, shown to the user
};

enum class Check { kQrIntegrity, kFingerprintMatch, kForgeryDetection, kRemovalDetection, kMotionMatch };
enum class CheckOutcome { kPass, kFail, kSkipped };

std::string_view to_string(Check check);
std::string_view to_string(CheckOutcome outcome);

struct VerificationVerdict {
  bool accepted = false;
  std::map<Check, CheckOutcome> checks;
  std::map<std::string, double> pce;

  // accepted = every non-skipped check passed (and at least one ran).
  void settle();
  CheckOutcome outcome(Check check) const;
};

struct VerifierConfig {
  double fingerprint_threshold = 300.0;
  double forgery_margin = 8192.0;  // t in pce(W1,W2) > pce(W1,K) + t
  double probe_threshold = 300.0;
  std::int64_t challenge_timeout_ms = 60'000;
  // Match W1 - probe1 (instead of W1) against the enrolled fingerprint.
  bool subtract_probe_for_fingerprint = true;
  int exclusion_radius = 5;
};

struct ChallengeSpec {
  int rows = 128;
  int cols = 128;
  double probe_sigma = camsim::kDefaultProbeSigma;
};

// Similarity statistics of one response, independent of any threshold. The
// harness computes them once per session and re-decides across a sweep.
struct SessionMeasurements {
  bool qr_ok = false;
  std::string qr_detail;
  double fingerprint_pce = 0.0;   // PCE(W1 [- G1], K)
  double inter_image_pce = 0.0;   // PCE(W1, W2)
  double registered_pce = 0.0;    // PCE(W1, K)
  std::array<double, 2> probe_pce{0.0, 0.0};  // PCE(Wi, Gi)
};

struct CheckResults {
  bool qr_integrity = false;
  bool fingerprint_match = false;
  bool forgery_detection = false;  // true: no forgery flagged
  bool removal_detection = false;  // true: both probes present
};

CheckResults evaluate_checks(const SessionMeasurements& m, const VerifierConfig& config);
VerificationVerdict decide(const SessionMeasurements& m, const VerifierConfig& config);

// Residues, spectra and PCE values of a response against its challenge.
SessionMeasurements measure_response(const Challenge& challenge,
                                     const std::array<mathcore::ImagePlane, 2>& response,
                                     const DeviceProfile& profile, const VerifierConfig& config,
                                     std::int64_t now_ms);

using Clock = std::function<std::int64_t()>;
Clock system_clock();

// The verifier role. Issued challenges are held until verified once; the
// challenge store is the only shared mutable state and is guarded.
class Verifier {
 public:
  explicit Verifier(ChallengeSpec spec = {}, Clock clock = system_clock());

  const ChallengeSpec& spec() const noexcept { return spec_; }
  void set_session_log(SessionLog* log) { log_ = log; }

  Challenge issue_challenge(mathcore::RandomStream& rng);

  // Consumes the session. Throws UnknownSession / ChallengeExpired.
  VerificationVerdict verify(const std::string& session_id, const std::array<mathcore::ImagePlane, 2>& response,
                             const DeviceProfile& profile, const VerifierConfig& config);

  // Same as verify() but also returns the raw measurements.
  std::pair<VerificationVerdict, SessionMeasurements> verify_detailed(
      const std::string& session_id, const std::array<mathcore::ImagePlane, 2>& response,
      const DeviceProfile& profile, const VerifierConfig& config);

  std::size_t pending() const;

 private:
  Challenge take(const std::string& session_id);

  ChallengeSpec spec_;
  Clock clock_;
  SessionLog* log_ = nullptr;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, Challenge> pending_;
};

}  // namespace abcauth::protocol
