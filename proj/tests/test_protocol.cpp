#include <gtest/gtest.h>

#include <sstream>
#include <vector>

#include "abcauth/camsim/block_code.hpp"
#include "abcauth/camsim/camera.hpp"
#include "abcauth/common/error.hpp"
#include "abcauth/mathcore/correlation.hpp"
#include "abcauth/prnu/residue.hpp"
#include "abcauth/protocol/profile.hpp"
#include "abcauth/protocol/session_log.hpp"
#include "abcauth/protocol/verifier.hpp"

using namespace abcauth;
using namespace abcauth::protocol;
using camsim::CameraDevice;
using mathcore::ImagePlane;
using mathcore::RandomStream;

namespace {

constexpr int kN = 128;

// Thresholds of the default seed's calibrated operating point.
VerifierConfig desk_config() {
  VerifierConfig c;
  c.fingerprint_threshold = 280.0;
  c.probe_threshold = 280.0;
  c.forgery_margin = 0.5 * kN * kN;
  return c;
}

DeviceProfile enrol(const CameraDevice& d, int images, RandomStream& rng, DeviceProfileStore& store) {
  std::vector<ImagePlane> caps, hints;
  for (int k = 0; k < images; ++k) {
    hints.push_back(camsim::encode_code({"reg-" + std::to_string(k), k}, kN, kN));
    caps.push_back(d.capture(hints.back(), rng));
  }
  return register_device(store, d.id(), caps, hints);
}

struct ManualClock {
  std::int64_t now = 1'000;
  Clock fn() {
    return [this] { return now; };
  }
};

std::array<ImagePlane, 2> genuine(const CameraDevice& d, const Challenge& ch, RandomStream& rng) {
  return {d.capture(ch.planes[0], rng), d.capture(ch.planes[1], rng)};
}

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoFailure;
}

}  // namespace

TEST(Registration, RecordsImageCountAndRejectsDuplicates) {
  RandomStream rng(1);
  DeviceProfileStore store;
  const CameraDevice a = CameraDevice::create("a", kN, kN, 1), b = CameraDevice::create("b", kN, kN, 2);
  EXPECT_EQ(enrol(a, 5, rng, store).fingerprint.image_count, 5);
  EXPECT_EQ(enrol(b, 1, rng, store).fingerprint.image_count, 1);
  EXPECT_EQ(store.size(), 2u);
  EXPECT_EQ(code_of([&] { enrol(a, 5, rng, store); }), ErrorCode::kDuplicateDevice);
  EXPECT_EQ(code_of([&] { register_device(store, "c", std::vector<ImagePlane>{}); }), ErrorCode::kEmptyInput);
  EXPECT_EQ(code_of([&] { (void)store.at("zzz"); }), ErrorCode::kUnknownDevice);
}

TEST(Challenge, PlanesAreCodePlusProbe) {
  ManualClock clock;
  Verifier v({kN, kN, camsim::kDefaultProbeSigma}, clock.fn());
  RandomStream rng(2);
  const Challenge a = v.issue_challenge(rng);
  const Challenge b = v.issue_challenge(rng);
  EXPECT_NE(a.session_id, b.session_id);
  EXPECT_EQ(v.pending(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(a.planes[i], a.codes[i] + a.probes[i].plane);
    EXPECT_EQ(camsim::decode_code(a.planes[i] - a.probes[i].plane), a.payloads[i]);
    EXPECT_EQ(a.payloads[i].timestamp_ms, clock.now);
    const double self = mathcore::pce(a.planes[i] - a.codes[i], a.probes[i].plane).value;
    EXPECT_GT(self, kN * kN / 2.0);
    EXPECT_LT(self, kN * kN * 2.0);
  }
  EXPECT_LT(mathcore::pce(a.probes[0].plane, a.probes[1].plane).value, 50.0);
  EXPECT_LT(mathcore::pce(a.probes[0].plane, b.probes[0].plane).value, 50.0);
}

TEST(Verify, GenuineResponsesAreAccepted) {
  int accepted = 0;
  for (int seed = 0; seed < 100; ++seed) {
    RandomStream rng(100 + seed);
    DeviceProfileStore store;
    const CameraDevice d = CameraDevice::create("d", kN, kN, 1000 + seed);
    const DeviceProfile p = enrol(d, 5, rng, store);
    Verifier v({kN, kN, camsim::kDefaultProbeSigma}, [] { return std::int64_t{5}; });
    const Challenge ch = v.issue_challenge(rng);
    const VerificationVerdict verdict = v.verify(ch.session_id, genuine(d, ch, rng), p, desk_config());
    accepted += verdict.accepted;
    if (verdict.accepted) {
      for (Check c : {Check::kQrIntegrity, Check::kFingerprintMatch, Check::kForgeryDetection,
                      Check::kRemovalDetection})
        EXPECT_EQ(verdict.outcome(c), CheckOutcome::kPass);
      EXPECT_EQ(verdict.outcome(Check::kMotionMatch), CheckOutcome::kSkipped);
    }
  }
  EXPECT_GE(accepted, 99);
}

TEST(Verify, ForeignDeviceFailsFingerprint) {
  RandomStream rng(3);
  DeviceProfileStore store;
  const CameraDevice d = CameraDevice::create("d", kN, kN, 1), o = CameraDevice::create("o", kN, kN, 2);
  const DeviceProfile p = enrol(d, 5, rng, store);
  Verifier v({kN, kN, camsim::kDefaultProbeSigma}, [] { return std::int64_t{5}; });
  const Challenge ch = v.issue_challenge(rng);
  const VerificationVerdict verdict = v.verify(ch.session_id, genuine(o, ch, rng), p, desk_config());
  EXPECT_FALSE(verdict.accepted);
  EXPECT_EQ(verdict.outcome(Check::kFingerprintMatch), CheckOutcome::kFail);
  EXPECT_EQ(verdict.outcome(Check::kRemovalDetection), CheckOutcome::kPass);
}

TEST(Verify, SharedInjectedResidueTripsForgeryCheck) {
  for (int seed = 0; seed < 20; ++seed) {
    RandomStream rng(40 + seed);
    DeviceProfileStore store;
    const CameraDevice d = CameraDevice::create("d", kN, kN, 50 + seed);
    const DeviceProfile p = enrol(d, 5, rng, store);
    Verifier v({kN, kN, camsim::kDefaultProbeSigma}, [] { return std::int64_t{5}; });
    const Challenge ch = v.issue_challenge(rng);
    const ImagePlane injected = rng.gaussian_plane(kN, kN, 8.0);
    const std::array<ImagePlane, 2> response{ch.planes[0] + injected, ch.planes[1] + injected};
    const VerificationVerdict verdict = v.verify(ch.session_id, response, p, desk_config());
    EXPECT_EQ(verdict.outcome(Check::kForgeryDetection), CheckOutcome::kFail) << seed;
    EXPECT_FALSE(verdict.accepted);
  }
}

TEST(Verify, RemovingAFingerprintEstimatedFromTheChallengePhotosStripsTheProbe) {
  int removal_failed = 0;
  for (int seed = 0; seed < 20; ++seed) {
    RandomStream rng(60 + seed);
    DeviceProfileStore store;
    const CameraDevice victim = CameraDevice::create("v", kN, kN, 70 + seed);
    const CameraDevice attacker = CameraDevice::create("a", kN, kN, 170 + seed);
    const DeviceProfile p = enrol(victim, 5, rng, store);
    Verifier v({kN, kN, camsim::kDefaultProbeSigma}, [] { return std::int64_t{5}; });
    const Challenge ch = v.issue_challenge(rng);
    const auto photos = genuine(attacker, ch, rng);
    ImagePlane own = prnu::extract_residue(photos[0]).plane + prnu::extract_residue(photos[1]).plane;
    own *= 0.5;
    const std::array<ImagePlane, 2> response{photos[0] - own + p.fingerprint.plane,
                                             photos[1] - own + p.fingerprint.plane};
    const VerificationVerdict verdict = v.verify(ch.session_id, response, p, desk_config());
    removal_failed += verdict.outcome(Check::kRemovalDetection) == CheckOutcome::kFail;
  }
  EXPECT_GE(removal_failed, 19);
}

TEST(Verify, TamperedCodeFailsIntegrity) {
  RandomStream rng(4);
  DeviceProfileStore store;
  const CameraDevice d = CameraDevice::create("d", kN, kN, 1);
  const DeviceProfile p = enrol(d, 5, rng, store);
  Verifier v({kN, kN, camsim::kDefaultProbeSigma}, [] { return std::int64_t{5}; });
  const Challenge ch = v.issue_challenge(rng);
  auto response = genuine(d, ch, rng);
  response[1] = d.capture(camsim::encode_code({"other", 5}, kN, kN) + ch.probes[1].plane, rng);
  const VerificationVerdict verdict = v.verify(ch.session_id, response, p, desk_config());
  EXPECT_EQ(verdict.outcome(Check::kQrIntegrity), CheckOutcome::kFail);
  EXPECT_FALSE(verdict.accepted);
}

TEST(Verify, ReplayUnknownAndExpiredSessions) {
  RandomStream rng(5);
  DeviceProfileStore store;
  const CameraDevice d = CameraDevice::create("d", kN, kN, 1);
  const DeviceProfile p = enrol(d, 1, rng, store);
  ManualClock clock;
  Verifier v({kN, kN, camsim::kDefaultProbeSigma}, clock.fn());
  const Challenge ch = v.issue_challenge(rng);
  const auto response = genuine(d, ch, rng);
  v.verify(ch.session_id, response, p, desk_config());
  EXPECT_EQ(code_of([&] { v.verify(ch.session_id, response, p, desk_config()); }), ErrorCode::kUnknownSession);
  EXPECT_EQ(code_of([&] { v.verify("nope", response, p, desk_config()); }), ErrorCode::kUnknownSession);

  const Challenge late = v.issue_challenge(rng);
  clock.now += desk_config().challenge_timeout_ms + 1;
  EXPECT_EQ(code_of([&] { v.verify(late.session_id, genuine(d, late, rng), p, desk_config()); }),
            ErrorCode::kChallengeExpired);
  EXPECT_EQ(v.pending(), 0u);
}

TEST(Decide, ThresholdMonotonicityAndBoundaries) {
  RandomStream rng(6);
  for (int trial = 0; trial < 2000; ++trial) {
    SessionMeasurements m;
    m.qr_ok = rng.bernoulli(0.9);
    m.fingerprint_pce = rng.uniform(0, 3000);
    m.inter_image_pce = rng.uniform(0, 12000);
    m.registered_pce = rng.uniform(0, 3000);
    m.probe_pce = {rng.uniform(0, 3000), rng.uniform(0, 3000)};
    VerifierConfig lo = desk_config();
    lo.fingerprint_threshold = rng.uniform(0, 3000);
    lo.probe_threshold = rng.uniform(0, 3000);
    VerifierConfig hi = lo;
    hi.fingerprint_threshold += rng.uniform(0, 500);
    hi.probe_threshold += rng.uniform(0, 500);
    const VerificationVerdict a = decide(m, lo), b = decide(m, hi);
    if (!a.accepted) ASSERT_FALSE(b.accepted);

    bool all = true;
    for (const auto& [check, outcome] : b.checks)
      if (outcome != CheckOutcome::kSkipped) all = all && outcome == CheckOutcome::kPass;
    ASSERT_EQ(b.accepted, all);

    VerifierConfig open = lo;
    open.forgery_margin = std::numeric_limits<double>::infinity();
    open.probe_threshold = 0.0;
    const VerificationVerdict c = decide(m, open);
    ASSERT_EQ(c.outcome(Check::kForgeryDetection), CheckOutcome::kPass);
    ASSERT_EQ(c.outcome(Check::kRemovalDetection), CheckOutcome::kPass);
  }
}

TEST(SessionLog, RecordsRoundTrip) {
  RandomStream rng(7);
  DeviceProfileStore store;
  const CameraDevice d = CameraDevice::create("d", kN, kN, 1);
  const DeviceProfile p = enrol(d, 5, rng, store);
  ManualClock clock;
  Verifier v({kN, kN, camsim::kDefaultProbeSigma}, clock.fn());
  std::stringstream buffer;
  SessionLog log(buffer);
  v.set_session_log(&log);
  for (int k = 0; k < 3; ++k) {
    const Challenge ch = v.issue_challenge(rng);
    v.verify(ch.session_id, genuine(d, ch, rng), p, desk_config());
  }
  const auto records = read_session_log(buffer);
  ASSERT_EQ(records.size(), 3u);
  for (const SessionRecord& r : records) {
    EXPECT_EQ(r.device_id, "d");
    EXPECT_EQ(r.verified_ms, clock.now);
    EXPECT_EQ(r.verdict.pce.size(), 5u);
    EXPECT_EQ(to_json_line(parse_json_line(to_json_line(r))), to_json_line(r));
    const SessionRecord back = parse_json_line(to_json_line(r));
    EXPECT_EQ(back.verdict.checks, r.verdict.checks);
    EXPECT_EQ(back.verdict.pce, r.verdict.pce);
    EXPECT_EQ(back.verdict.accepted, r.verdict.accepted);
  }
}
