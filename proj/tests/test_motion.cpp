#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "abcauth/common/error.hpp"
#include "abcauth/motion/generator.hpp"
#include "abcauth/motion/ingest.hpp"
#include "abcauth/motion/preprocess.hpp"
#include "abcauth/motion/recording.hpp"
#include "oracles.hpp"

using namespace abcauth;
using namespace abcauth::motion;
using mathcore::RandomStream;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoFailure;
}

double pearson(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double total = 0.0;
  for (int c = 0; c < a.rows(); ++c) {
    const Eigen::ArrayXd x = a.row(c).array() - a.row(c).mean();
    const Eigen::ArrayXd y = b.row(c).array() - b.row(c).mean();
    total += (x * y).sum() / std::sqrt((x * x).sum() * (y * y).sum() + 1e-300);
  }
  return total / a.rows();
}

}  // namespace

TEST(Generator, WindowShapeContract) {
  MotionDeviceModel m = MotionDeviceModel::create("p", 3);
  for (int draw = 0; draw < 1000; ++draw) {
    const std::int64_t shutter = 1'000'000 + draw * 5'000;
    const RawMotionRecording r = m.record_window(shutter);
    ASSERT_NO_THROW(r.validate());
    for (const auto& ch : r.channels) {
      ASSERT_GE(ch.size(), 140u);
      ASSERT_LE(ch.size(), 160u);
      ASSERT_GT(ch.timestamps_ms.front(), shutter - kWindowBeforeMs - 10.0);
      ASSERT_LT(ch.timestamps_ms.back(), shutter + kWindowAfterMs + 10.0);
    }
  }
}

TEST(Generator, SameModelIsDeterministic) {
  const MotionDeviceModel a = MotionDeviceModel::create("p", 9), b = MotionDeviceModel::create("p", 9);
  RandomStream r1(4), r2(4);
  const RawMotionRecording x = a.record_window(0, r1), y = b.record_window(0, r2);
  for (int c = 0; c < kChannelCount; ++c) EXPECT_EQ(x.channels[c].values, y.channels[c].values);
}

TEST(Generator, NoiselessSingleSinusoidIsExact) {
  std::array<ChannelSignature, kChannelCount> sig{};
  for (int c = 0; c < kChannelCount; ++c) sig[c].components[0] = {2.0 + c, 0.7, 0.3 * c};
  const MotionDeviceModel m("s", sig, GeneratorNoise{0.0, 0.0, 0.0, 0.0}, 1);
  RandomStream rng(2);
  const RawMotionRecording r = m.record_window(10'000, rng);
  for (int c = 0; c < kChannelCount; ++c)
    for (std::size_t i = 0; i < r.channels[c].size(); ++i) {
      const double t = (r.channels[c].timestamps_ms[i] - 10'000) / 1000.0;
      ASSERT_NEAR(r.channels[c].values[i], 0.7 * std::sin(2 * std::numbers::pi * (2.0 + c) * t + 0.3 * c), 1e-12);
    }
}

TEST(Generator, WindowsOfOneDeviceCorrelateMoreThanAcrossDevices) {
  int wins = 0;
  for (int seed = 0; seed < 50; ++seed) {
    const MotionDeviceModel a = MotionDeviceModel::create("a", 100 + seed);
    const MotionDeviceModel b = MotionDeviceModel::create("b", 200 + seed);
    RandomStream rng(seed);
    const Eigen::MatrixXd a1 = preprocess(a.record_window(0, rng)).values();
    const Eigen::MatrixXd a2 = preprocess(a.record_window(0, rng)).values();
    const Eigen::MatrixXd b1 = preprocess(b.record_window(0, rng)).values();
    wins += pearson(a1, a2) > pearson(a1, b1);
  }
  EXPECT_GE(wins, 45);
}

TEST(Preprocess, FuzzedRecordingsGiveValidSamples) {
  RandomStream rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const MotionSample s = preprocess(oracle::random_recording(rng));
    ASSERT_EQ(s.values().rows(), kChannelCount);
    ASSERT_EQ(s.values().cols(), kSampleLength);
    ASSERT_FALSE(s.values().hasNaN());
    ASSERT_GE(s.values().minCoeff(), 0.0);
    ASSERT_LE(s.values().maxCoeff(), 1.0);
  }
  MotionDeviceModel m = MotionDeviceModel::create("g", 5);
  for (int trial = 0; trial < 200; ++trial) {
    const MotionSample s = preprocess(m.record_window(trial * 2000));
    ASSERT_GE(s.values().minCoeff(), 0.0);
    ASSERT_LE(s.values().maxCoeff(), 1.0);
  }
}

TEST(Preprocess, PositiveScaleInvariance) {
  RandomStream rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    RawMotionRecording r = oracle::random_recording(rng);
    RawMotionRecording scaled = r;
    const double c = std::pow(10.0, rng.uniform(-3, 3));
    for (auto& ch : scaled.channels)
      for (double& v : ch.values) v *= c;
    const Eigen::MatrixXd d = preprocess(r).values() - preprocess(scaled).values();
    for (int ch = 0; ch < kChannelCount; ++ch) {
      const double tol = oracle::scale_invariance_tolerance(r.channels[ch]);
      ASSERT_LT(d.row(ch).cwiseAbs().maxCoeff(), tol) << trial << " channel " << ch;
    }
  }
}

TEST(Preprocess, RampAndConstantChannels) {
  RawMotionRecording r;
  for (int c = 0; c < kChannelCount; ++c) {
    for (int i = 0; i < 5; ++i) {
      r.channels[c].timestamps_ms.push_back(100.0 + 25.0 * i);
      r.channels[c].values.push_back(c == 5 ? 3.5 : 2.0 + 4.0 * i);
    }
  }
  const MotionSample s = preprocess(r);
  for (int c = 0; c < 5; ++c)
    for (int k = 0; k < kSampleLength; ++k) ASSERT_NEAR(s(c, k), k / 149.0, 1e-12);
  for (int k = 0; k < kSampleLength; ++k) ASSERT_EQ(s(5, k), 0.0);
}

TEST(Preprocess, LengthAndErrors) {
  RandomStream rng(9);
  RawMotionRecording r;
  for (auto& ch : r.channels)
    for (int i = 0; i < 147; ++i) {
      ch.timestamps_ms.push_back(i * 10.0);
      ch.values.push_back(rng.normal());
    }
  EXPECT_EQ(preprocess(r).values().cols(), 150);
  r.channels[2].timestamps_ms.resize(1);
  r.channels[2].values.resize(1);
  EXPECT_EQ(code_of([&] { preprocess(r); }), ErrorCode::kTooFewSamples);
  EXPECT_EQ(code_of([] { MotionSample(Eigen::MatrixXd::Zero(6, 149)); }), ErrorCode::kShapeMismatch);
  EXPECT_EQ(code_of([] { MotionSample(Eigen::MatrixXd::Constant(6, 150, 1.5)); }), ErrorCode::kDegenerateInput);
}

TEST(Preprocess, GlobalRescaleOption) {
  RandomStream rng(10);
  const RawMotionRecording r = oracle::random_recording(rng);
  const MotionSample s = preprocess(r, {.per_channel_rescale = false, .interpolate_by_time = true});
  EXPECT_DOUBLE_EQ(s.values().maxCoeff(), 1.0);
  EXPECT_GE(s.values().minCoeff(), 0.0);
  const MotionSample t = preprocess(r, {.per_channel_rescale = true, .interpolate_by_time = false});
  EXPECT_LE(t.values().maxCoeff(), 1.0);
}

TEST(Resample, IdentityOnUniformKnotsAndEndpoints) {
  RandomStream rng(11);
  std::vector<double> t(150), v(150);
  for (int i = 0; i < 150; ++i) {
    t[i] = 40.0 + 10.0 * i;
    v[i] = rng.normal();
  }
  const std::vector<double> out = resample_linear(t, v, 150);
  for (int i = 0; i < 150; ++i) ASSERT_NEAR(out[i], v[i], 1e-12);
  const std::vector<double> few = resample_linear(std::vector<double>{0, 1, 5}, std::vector<double>{1, 3, -1}, 11);
  EXPECT_DOUBLE_EQ(few.front(), 1.0);
  EXPECT_DOUBLE_EQ(few.back(), -1.0);
  EXPECT_NEAR(few[1], 2.0, 1e-12);  // t = 0.5, halfway between the first two knots
}

TEST(Ingest, TwoTapsGiveTwoRecordings) {
  std::ostringstream csv;
  csv << "user,sensor,axis,timestamp_ms,value\n# comment\n";
  for (int t = 0; t < 4000; t += 10)
    for (const char* s : {"acc", "gyr"})
      for (const char* a : {"x", "y", "z"}) csv << "u1," << s << "," << a << "," << t << "," << (t % 70) * 0.01 << "\n";
  csv << "u1,tap,x,1000,0\nu1,tap,x,2500,0\n";
  std::istringstream in(csv.str());
  const auto recs = ingest_csv(in);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].source_id, "u1");
  EXPECT_EQ(recs[0].tap_ms, 1000);
  for (const auto& ch : recs[1].channels) {
    EXPECT_GE(ch.timestamps_ms.front(), 2000.0);
    EXPECT_LE(ch.timestamps_ms.back(), 3500.0);
    EXPECT_EQ(ch.size(), 151u);
  }
  EXPECT_NO_THROW(preprocess(recs[0]));
}

TEST(Ingest, Errors) {
  std::istringstream bad("u1,acc,x,0,1.0\nu1,acc,x,10,abc\n");
  try {
    ingest_csv(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedRow);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream unknown("u1,mag,x,0,1.0\n");
  EXPECT_EQ(code_of([&] { ingest_csv(unknown); }), ErrorCode::kMalformedRow);
  std::istringstream empty("u1,acc,x,0,1.0\nu1,tap,x,90000,0\n");
  EXPECT_EQ(code_of([&] { ingest_csv(empty); }), ErrorCode::kEmptyWindow);
  EXPECT_EQ(code_of([] { ingest_csv(std::filesystem::path("/nonexistent/motion.csv")); }), ErrorCode::kIoFailure);
}
