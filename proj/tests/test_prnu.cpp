#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "abcauth/camsim/block_code.hpp"
#include "abcauth/camsim/camera.hpp"
#include "abcauth/common/error.hpp"
#include "abcauth/mathcore/correlation.hpp"
#include "abcauth/prnu/residue.hpp"

using namespace abcauth;
using namespace abcauth::prnu;
using camsim::CameraDevice;
using mathcore::ImagePlane;
using mathcore::RandomStream;

namespace {

CameraFingerprintEstimate estimate_from(const CameraDevice& d, int n, RandomStream& rng, bool hinted) {
  std::vector<ImagePlane> images, hints;
  for (int k = 0; k < n; ++k) {
    hints.push_back(camsim::natural_scene(d.rows(), d.cols(), rng));
    images.push_back(d.capture(hints.back(), rng));
  }
  if (!hinted) hints.clear();
  return estimate_fingerprint(images, hints, FingerprintSource::kRegistration);
}

}  // namespace

TEST(Residue, HintPathIsExact) {
  const CameraDevice d = CameraDevice::create("d", 64, 64, 1);
  RandomStream rng(2);
  const ImagePlane scene = camsim::natural_scene(64, 64, rng);
  const ImagePlane image = d.capture(scene, rng);
  const NoiseResidue w = extract_residue(image, scene);
  EXPECT_LT(std::abs(w.plane.mean()), 1e-9);
  const double removed = (image - scene).mean();
  for (std::size_t k = 0; k < image.size(); ++k)
    ASSERT_NEAR(scene.values()[k] + w.plane.values()[k] + removed, image.values()[k], 1e-9);
}

TEST(Residue, BlindPathIsZeroMeanAndFlatOnConstants) {
  RandomStream rng(3);
  const CameraDevice d = CameraDevice::create("d", 64, 64, 1);
  const NoiseResidue w = extract_residue(d.capture(camsim::natural_scene(64, 64, rng), rng));
  EXPECT_LT(std::abs(w.plane.mean()), 1e-6 * 255.0);
  const NoiseResidue flat = extract_residue(ImagePlane(32, 32, 117.0));
  EXPECT_LT(flat.plane.sum_of_squares(), 1e-18);
  EXPECT_EQ(gaussian_denoise(ImagePlane(9, 7, 42.5)), ImagePlane(9, 7, 42.5));
}

TEST(Residue, BlindPathSeparatesDevices) {
  RandomStream rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const CameraDevice d = CameraDevice::create("d", 128, 128, 10 + trial);
    const CameraDevice o = CameraDevice::create("o", 128, 128, 90 + trial);
    const NoiseResidue w = extract_residue(d.capture(camsim::natural_scene(128, 128, rng), rng));
    EXPECT_GT(mathcore::pce(w.plane, d.fingerprint()).value, 10.0 * mathcore::pce(w.plane, o.fingerprint()).value);
  }
}

TEST(Estimate, SingleHintedImageEqualsItsResidue) {
  const CameraDevice d = CameraDevice::create("d", 64, 64, 1);
  RandomStream rng(5);
  const ImagePlane scene = camsim::encode_code({"r", 1}, 64, 64);
  const ImagePlane image = d.capture(scene, rng);
  const std::array<ImagePlane, 1> images{image}, hints{scene};
  const CameraFingerprintEstimate e = estimate_fingerprint(images, hints, FingerprintSource::kRegistration);
  EXPECT_EQ(e.image_count, 1);
  EXPECT_EQ(e.plane, extract_residue(image, scene).plane);
}

TEST(Estimate, FiveImagesBeatOne) {
  int wins = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const CameraDevice d = CameraDevice::create("d", 128, 128, 300 + trial);
    RandomStream rng(700 + trial);
    const double one = mathcore::pce(estimate_from(d, 1, rng, true).plane, d.fingerprint()).value;
    const double five = mathcore::pce(estimate_from(d, 5, rng, true).plane, d.fingerprint()).value;
    wins += five > one;
  }
  EXPECT_GE(wins, 95);
}

TEST(Estimate, ConvergesWithMoreImages) {
  const std::array<int, 4> counts{1, 2, 5, 10};
  std::array<double, 4> mean{};
  for (int trial = 0; trial < 50; ++trial) {
    const CameraDevice d = CameraDevice::create("d", 64, 64, 1000 + trial);
    RandomStream rng(2000 + trial);
    for (std::size_t k = 0; k < counts.size(); ++k)
      mean[k] += mathcore::pce(estimate_from(d, counts[k], rng, false).plane, d.fingerprint()).value / 50.0;
  }
  for (std::size_t k = 1; k < counts.size(); ++k) EXPECT_GT(mean[k], mean[k - 1]);
}

TEST(Estimate, Errors) {
  std::vector<ImagePlane> none;
  try {
    estimate_fingerprint(none, {}, FingerprintSource::kRegistration);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
  const std::array<ImagePlane, 2> images{ImagePlane(8, 8, 1.0), ImagePlane(8, 8, 2.0)};
  const std::array<ImagePlane, 1> hints{ImagePlane(8, 8, 0.0)};
  try {
    estimate_fingerprint(images, hints, FingerprintSource::kRegistration);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(Estimate, SourceNamesRoundTrip) {
  for (auto s : {FingerprintSource::kRegistration, FingerprintSource::kAdversarySidePhotos,
                 FingerprintSource::kVictimSocialPhotos})
    EXPECT_EQ(fingerprint_source_from_string(to_string(s)), s);
}
