#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <string>

#include "abcauth/camsim/block_code.hpp"
#include "abcauth/camsim/camera.hpp"
#include "abcauth/common/error.hpp"
#include "abcauth/mathcore/correlation.hpp"
#include "abcauth/prnu/residue.hpp"

using namespace abcauth;
using namespace abcauth::camsim;
using mathcore::ImagePlane;
using mathcore::RandomStream;

namespace {

std::string random_text(RandomStream& rng, int length) {
  std::string s;
  for (int i = 0; i < length; ++i) s.push_back(static_cast<char>(rng.uniform_int(32, 126)));
  return s;
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

TEST(BlockCode, BinaryPlane) {
  const ImagePlane p = encode_code({"txn-1", 1'700'000'000'000}, 128, 128);
  for (double v : p.values()) ASSERT_TRUE(v == 0.0 || v == 255.0);
}

TEST(BlockCode, RandomPayloadRoundTrip) {
  RandomStream rng(2024);
  const int cap = code_capacity_bytes(128, 128);
  ASSERT_GT(cap, 100);
  for (int trial = 0; trial < 1000; ++trial) {
    const QrPayload p{random_text(rng, rng.uniform_int(1, cap)), static_cast<std::int64_t>(rng.next_u64())};
    ASSERT_EQ(decode_code(encode_code(p, 128, 128)), p) << trial;
  }
}

TEST(BlockCode, FullCapacityAndOverflow) {
  RandomStream rng(5);
  const int cap = code_capacity_bytes(64, 96);
  const QrPayload full{random_text(rng, cap), -12345};
  EXPECT_EQ(decode_code(encode_code(full, 64, 96)), full);
  EXPECT_EQ(code_of([&] { encode_code({random_text(rng, cap + 1), 0}, 64, 96); }), ErrorCode::kPayloadTooLarge);
}

TEST(BlockCode, OneCharacterChangesABlock) {
  const ImagePlane a = encode_code({"session-a", 7}, 128, 128);
  const ImagePlane b = encode_code({"session-b", 7}, 128, 128);
  EXPECT_NE(a, b);
}

TEST(BlockCode, SurvivesModerateNoise) {
  RandomStream rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const QrPayload p{random_text(rng, 40), trial};
    ImagePlane plane = encode_code(p, 128, 128);
    plane += rng.gaussian_plane(128, 128, 10.0);
    ASSERT_EQ(decode_code(plane), p);
  }
}

TEST(BlockCode, TamperAndEmptyPlaneAreRejected) {
  EXPECT_EQ(code_of([] { decode_code(ImagePlane(128, 128, 0.0)); }), ErrorCode::kChecksumFailure);
  ImagePlane plane = encode_code({"abc", 1}, 128, 128);
  // flip a block inside the text bytes (bits 80.. of the stream)
  const int block = 90, per_row = 128 / kBlockSize;
  const int r0 = (block / per_row) * kBlockSize, c0 = (block % per_row) * kBlockSize;
  for (int r = r0; r < r0 + kBlockSize; ++r)
    for (int c = c0; c < c0 + kBlockSize; ++c) plane(r, c) = 255.0 - plane(r, c);
  EXPECT_EQ(code_of([&] { decode_code(plane); }), ErrorCode::kChecksumFailure);
  EXPECT_EQ(code_of([] { encode_code({"", 1}, 128, 128); }), ErrorCode::kConfigInvalid);
}

TEST(Camera, NoiselessZeroSceneIsTheFingerprint) {
  const CameraDevice d = CameraDevice::create("d", 32, 32, 9, 2.0, 0.0);
  RandomStream rng(1);
  EXPECT_EQ(d.capture(ImagePlane(32, 32, 0.0), rng), d.fingerprint());
}

TEST(Camera, FingerprintStatisticsAndReproducibility) {
  const CameraDevice a = CameraDevice::create("a", 128, 128, 3);
  const CameraDevice b = CameraDevice::create("a", 128, 128, 3);
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  const double sd = std::sqrt(a.fingerprint().centered().sum_of_squares() / a.fingerprint().size());
  EXPECT_NEAR(sd, kDefaultFingerprintSigma, 0.05);
}

TEST(Camera, RepeatedCapturesDifferByShotNoise) {
  const CameraDevice d = CameraDevice::create("d", 64, 64, 4);
  RandomStream rng(8);
  const ImagePlane scene = natural_scene(64, 64, rng);
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (int k = 0; k < 100; ++k) {
    const ImagePlane diff = d.capture(scene, rng) - d.capture(scene, rng);
    for (double v : diff.values()) {
      sum += v;
      sq += v * v;
      ++n;
    }
  }
  const double mean = sum / n, sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(sd, kDefaultShotSigma * std::sqrt(2.0), 0.05);
}

TEST(Camera, DifferentDevicesAreUncorrelatedAndSeparable) {
  RandomStream rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const CameraDevice d = CameraDevice::create("d", 128, 128, 100 + trial);
    const CameraDevice o = CameraDevice::create("o", 128, 128, 500 + trial);
    const ImagePlane scene = natural_scene(128, 128, rng);
    const ImagePlane wd = d.capture(scene, rng) - scene;
    const ImagePlane wo = o.capture(scene, rng) - scene;
    ASSERT_LT(mathcore::pce(wd, wo).value, 50.0) << trial;
    const double own = mathcore::pce(wd, d.fingerprint()).value;
    const double other = mathcore::pce(wd, o.fingerprint()).value;
    ASSERT_GT(own, 20.0 * std::max(other, 1.0)) << trial;
  }
}

TEST(Camera, CaptureIsLinearInTheScene) {
  const CameraDevice d = CameraDevice::create("d", 64, 64, 6);
  RandomStream rng(3);
  const ImagePlane s1 = natural_scene(64, 64, rng), s2 = natural_scene(64, 64, rng);
  const ImagePlane e = d.capture(ImagePlane(64, 64, 0.0), rng);
  const ImagePlane lhs = d.capture(s1 + s2, rng) - d.capture(s2, rng) - (d.capture(s1, rng) - e);
  // four independent shot-noise draws
  const double sd = std::sqrt(lhs.sum_of_squares() / lhs.size());
  EXPECT_NEAR(sd, 2.0 * kDefaultShotSigma, 0.3);
}

TEST(Camera, QuantizedCaptureAndShapeErrors) {
  const CameraDevice d = CameraDevice::create("d", 64, 64, 6);
  RandomStream rng(3);
  const ImagePlane q = d.capture(encode_code({"x", 1}, 64, 64), rng, {.quantize_8bit = true});
  for (double v : q.values()) ASSERT_TRUE(v >= 0.0 && v <= 255.0 && v == std::round(v));
  EXPECT_EQ(code_of([&] { d.capture(ImagePlane(64, 65, 0.0), rng); }), ErrorCode::kDimensionMismatch);
}

TEST(Probe, IndependentDraws) {
  RandomStream rng(4);
  const ProbeSignal a = ProbeSignal::generate("a", 128, 128, kDefaultProbeSigma, rng);
  const ProbeSignal b = ProbeSignal::generate("b", 128, 128, kDefaultProbeSigma, rng);
  EXPECT_LT(mathcore::pce(a.plane, b.plane).value, 50.0);
}
