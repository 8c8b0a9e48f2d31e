#include "abcauth/protocol/verifier.hpp"

#include <chrono>
#include <cstdio>

#include "abcauth/common/error.hpp"
#include "abcauth/mathcore/correlation.hpp"
#include "abcauth/prnu/residue.hpp"
#include "abcauth/protocol/session_log.hpp"

namespace abcauth::protocol {

using mathcore::ImagePlane;
using mathcore::Spectrum;

std::string_view to_string(Check check) {
  switch (check) {
    case Check::kQrIntegrity: return "qr_integrity";
    case Check::kFingerprintMatch: return "fingerprint_match";
    case Check::kForgeryDetection: return "forgery_detection";
    case Check::kRemovalDetection: return "removal_detection";
    case Check::kMotionMatch: return "motion_match";
  }
  return "unknown";
}

std::string_view to_string(CheckOutcome outcome) {
  switch (outcome) {
    case CheckOutcome::kPass: return "pass";
    case CheckOutcome::kFail: return "fail";
    case CheckOutcome::kSkipped: return "skipped";
  }
  return "unknown";
}

void VerificationVerdict::settle() {
  bool any_ran = false;
  bool all_pass = true;
  for (const auto& [_, outcome] : checks) {
    if (outcome == CheckOutcome::kSkipped) continue;
    any_ran = true;
    all_pass = all_pass && outcome == CheckOutcome::kPass;
  }
  accepted = any_ran && all_pass;
}

CheckOutcome VerificationVerdict::outcome(Check check) const {
  auto it = checks.find(check);
  return it == checks.end() ? CheckOutcome::kSkipped : it->second;
}

namespace {

CheckOutcome pass_if(bool ok) { return ok ? CheckOutcome::kPass : CheckOutcome::kFail; }

}  // namespace

CheckResults evaluate_checks(const SessionMeasurements& m, const VerifierConfig& config) {
  CheckResults r;
  r.qr_integrity = m.qr_ok;
  r.fingerprint_match = m.fingerprint_pce > config.fingerprint_threshold;
  r.forgery_detection = !(m.inter_image_pce > m.registered_pce + config.forgery_margin);
  r.removal_detection = m.probe_pce[0] >= config.probe_threshold && m.probe_pce[1] >= config.probe_threshold;
  return r;
}

VerificationVerdict decide(const SessionMeasurements& m, const VerifierConfig& config) {
  if (config.fingerprint_threshold < 0 || config.probe_threshold < 0 || config.forgery_margin < 0) {
    fail(ErrorCode::kConfigInvalid, "verifier thresholds must be non-negative");
  }
  const CheckResults r = evaluate_checks(m, config);
  VerificationVerdict v;
  v.checks[Check::kQrIntegrity] = pass_if(r.qr_integrity);
  v.checks[Check::kFingerprintMatch] = pass_if(r.fingerprint_match);
  v.checks[Check::kForgeryDetection] = pass_if(r.forgery_detection);
  v.checks[Check::kRemovalDetection] = pass_if(r.removal_detection);
  v.checks[Check::kMotionMatch] = CheckOutcome::kSkipped;
  v.pce["fingerprint"] = m.fingerprint_pce;
  v.pce["inter_image"] = m.inter_image_pce;
  v.pce["registered"] = m.registered_pce;
  v.pce["probe_1"] = m.probe_pce[0];
  v.pce["probe_2"] = m.probe_pce[1];
  v.settle();
  return v;
}

SessionMeasurements measure_response(const Challenge& challenge, const std::array<ImagePlane, 2>& response,
                                     const DeviceProfile& profile, const VerifierConfig& config,
                                     std::int64_t now_ms) {
  SessionMeasurements m;
  m.qr_ok = true;
  for (int i = 0; i < 2; ++i) {
    mathcore::require_same_shape(response[i], challenge.codes[i], "response image");
    try {
      const camsim::QrPayload decoded = camsim::decode_code(response[i]);
      if (!(decoded == challenge.payloads[i])) {
        m.qr_ok = false;
        m.qr_detail = "payload " + std::to_string(i + 1) + " does not match the challenge";
      } else if (now_ms - decoded.timestamp_ms > config.challenge_timeout_ms) {
        m.qr_ok = false;
        m.qr_detail = "payload " + std::to_string(i + 1) + " is stale";
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kChecksumFailure) throw;
      m.qr_ok = false;
      m.qr_detail = e.what();
    }
  }

  const int r = config.exclusion_radius;
  const ImagePlane w1 = prnu::extract_residue(response[0], challenge.codes[0]).plane;
  const ImagePlane w2 = prnu::extract_residue(response[1], challenge.codes[1]).plane;
  const Spectrum s_w1 = Spectrum::of(w1);
  const Spectrum s_w2 = Spectrum::of(w2);
  const Spectrum s_g1 = Spectrum::of(challenge.probes[0].plane);
  const Spectrum s_g2 = Spectrum::of(challenge.probes[1].plane);
  const Spectrum s_k = Spectrum::of(profile.fingerprint.plane);

  m.registered_pce = mathcore::pce(s_w1, s_k, r).value;
  m.fingerprint_pce =
      config.subtract_probe_for_fingerprint ? mathcore::pce(s_w1 - s_g1, s_k, r).value : m.registered_pce;
  m.inter_image_pce = mathcore::pce(s_w1, s_w2, r).value;
  m.probe_pce[0] = mathcore::pce(s_w1, s_g1, r).value;
  m.probe_pce[1] = mathcore::pce(s_w2, s_g2, r).value;
  return m;
}

Clock system_clock() {
  return [] {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
  };
}

Verifier::Verifier(ChallengeSpec spec, Clock clock) : spec_(spec), clock_(std::move(clock)) {
  if (spec_.rows <= 0 || spec_.cols <= 0) fail(ErrorCode::kConfigInvalid, "challenge plane must be non-empty");
  if (!clock_) fail(ErrorCode::kConfigInvalid, "verifier needs a clock");
}

Challenge Verifier::issue_challenge(mathcore::RandomStream& rng) {
  Challenge c;
  c.issued_ms = clock_();
  {
    std::lock_guard lock(mutex_);
    do {
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng.next_u64()));
      c.session_id = buf;
    } while (pending_.contains(c.session_id));
  }
  for (int i = 0; i < 2; ++i) {
    c.payloads[i] = camsim::QrPayload{c.session_id + ":" + std::to_string(i + 1), c.issued_ms};
    c.codes[i] = camsim::encode_code(c.payloads[i], spec_.rows, spec_.cols);
    c.probes[i] = camsim::ProbeSignal::generate(c.session_id + "/probe" + std::to_string(i + 1), spec_.rows,
                                                spec_.cols, spec_.probe_sigma, rng);
    c.planes[i] = c.codes[i] + c.probes[i].plane;
  }
  std::lock_guard lock(mutex_);
  pending_.emplace(c.session_id, c);
  return c;
}

Challenge Verifier::take(const std::string& session_id) {
  std::lock_guard lock(mutex_);
  auto it = pending_.find(session_id);
  if (it == pending_.end()) fail(ErrorCode::kUnknownSession, "unknown or consumed session '" + session_id + "'");
  Challenge c = std::move(it->second);
  pending_.erase(it);
  return c;
}

std::size_t Verifier::pending() const {
  std::lock_guard lock(mutex_);
  return pending_.size();
}

VerificationVerdict Verifier::verify(const std::string& session_id, const std::array<ImagePlane, 2>& response,
                                     const DeviceProfile& profile, const VerifierConfig& config) {
  return verify_detailed(session_id, response, profile, config).first;
}

std::pair<VerificationVerdict, SessionMeasurements> Verifier::verify_detailed(
    const std::string& session_id, const std::array<ImagePlane, 2>& response, const DeviceProfile& profile,
    const VerifierConfig& config) {
  const Challenge challenge = take(session_id);
  const std::int64_t now = clock_();
  if (now - challenge.issued_ms > config.challenge_timeout_ms) {
    fail(ErrorCode::kChallengeExpired, "session '" + session_id + "' expired");
  }
  SessionMeasurements m = measure_response(challenge, response, profile, config, now);
  VerificationVerdict verdict = decide(m, config);
  if (log_ != nullptr) {
    log_->append(SessionRecord{session_id, profile.device_id, verdict, challenge.issued_ms, now});
  }
  return {std::move(verdict), std::move(m)};
}

}  // namespace abcauth::protocol
