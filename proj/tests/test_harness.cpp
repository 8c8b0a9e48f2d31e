#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "abcauth/common/error.hpp"
#include "abcauth/harness/config.hpp"
#include "abcauth/harness/experiment.hpp"
#include "abcauth/harness/population.hpp"
#include "abcauth/harness/profile_store.hpp"
#include "abcauth/harness/report.hpp"

using namespace abcauth;
using namespace abcauth::harness;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(std::uint64_t seed = 3) {
  ExperimentConfig c;
  c.seed = seed;
  c.devices = 3;
  c.genuine_sessions = 6;
  c.attacks_per_pair = 4;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "abcauth-harness-tests";
  fs::create_directories(dir);
  return dir / name;
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

TEST(Config, JsonRoundTripAndOverrides) {
  ExperimentConfig c = small_config();
  c.scheme = DefenseScheme::kMultimodal;
  c.attack = attack::AttackScheme::kInSession;
  c.operating_threshold = 420.0;
  c.auto_forgery_margin = false;
  c.verifier.forgery_margin = 1234.0;
  c.motion.convlstm_layout = neural::SequenceLayout::kSpatialMaps;
  c.motion.svm.kernel = svm::KernelKind::kLinear;
  const auto j = to_json(c);
  const ExperimentConfig back = config_from_json(j);
  EXPECT_EQ(to_json(back).dump(), j.dump());
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_EQ(back.effective_forgery_margin(), 1234.0);
  EXPECT_EQ(ExperimentConfig{}.effective_forgery_margin(), 0.5 * 128 * 128);

  const ExperimentConfig partial = config_from_json(nlohmann::json::parse(R"({"seed": 9, "plane": {"rows": 64}})"));
  EXPECT_EQ(partial.seed, 9u);
  EXPECT_EQ(partial.rows, 64);
  EXPECT_EQ(partial.cols, 128);
}

TEST(Config, RejectsUnknownAndInvalidFields) {
  EXPECT_EQ(code_of([] { config_from_json(nlohmann::json::parse(R"({"sede": 1})")); }), ErrorCode::kConfigInvalid);
  EXPECT_EQ(code_of([] { config_from_json(nlohmann::json::parse(R"({"motion": {"svm": {"kernal": "rbf"}}})")); }),
            ErrorCode::kConfigInvalid);
  EXPECT_EQ(code_of([] { config_from_json(nlohmann::json::parse(R"({"scheme": "both"})")); }),
            ErrorCode::kConfigInvalid);
  ExperimentConfig c;
  c.devices = 1;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::kConfigInvalid);
  EXPECT_EQ(code_of([] { load_config("/nonexistent/abcauth.json"); }), ErrorCode::kIoFailure);
}

TEST(Config, EnvironmentDefaultPath) {
  const fs::path p = scratch("env-config.json");
  std::ofstream(p) << R"({"seed": 99})";
  ::setenv("ABCAUTH_CONFIG", p.c_str(), 1);
  ASSERT_TRUE(default_config_path().has_value());
  EXPECT_EQ(load_config(*default_config_path()).seed, 99u);
  ::unsetenv("ABCAUTH_CONFIG");
  EXPECT_FALSE(default_config_path().has_value());
}

TEST(Config, SweepGrid) {
  const auto t = SweepRange{}.thresholds();
  ASSERT_EQ(t.size(), 401u);
  EXPECT_EQ(t.front(), 0.0);
  EXPECT_EQ(t[137], 1370.0);
  EXPECT_EQ(t.back(), 4000.0);
}

TEST(Population, SeedsAreLabelledAndStable) {
  const ExperimentConfig c = small_config();
  const Population a = make_population(c), b = make_population(c);
  ASSERT_EQ(a.cameras.size(), 3u);
  EXPECT_EQ(a.cameras[1].id(), "device-2");
  EXPECT_EQ(a.cameras[2].fingerprint(), b.cameras[2].fingerprint());
  EXPECT_NE(a.cameras[0].fingerprint(), a.cameras[1].fingerprint());
  EXPECT_EQ(a.pretrain_extras.size(), 4u);
  EXPECT_EQ(a.pool.size(), 4u);
  EXPECT_EQ(a.index_of("device-3"), 2);
  EXPECT_EQ(code_of([&] { (void)a.index_of("device-9"); }), ErrorCode::kUnknownDevice);
  EXPECT_EQ(derived_seed(5, "x"), mathcore::RandomStream(5).derive("x").seed());
}

TEST(Experiment, AccountingAndSweepMonotonicity) {
  const ExperimentRun run = run_experiment_detailed(small_config());
  const EvalReport& r = run.report;
  EXPECT_EQ(r.genuine_sessions, 3u * 6u);
  EXPECT_EQ(r.attack_sessions, 3u * 2u * 4u);
  ASSERT_EQ(r.rows.size(), 401u);
  for (std::size_t k = 1; k < r.rows.size(); ++k) {
    EXPECT_LE(r.rows[k].fdrd_far, r.rows[k - 1].fdrd_far);
    EXPECT_LE(r.rows[k].fd_far, r.rows[k - 1].fd_far);
    EXPECT_LE(r.rows[k].rd_far, r.rows[k - 1].rd_far);
    EXPECT_GE(r.rows[k].frr, r.rows[k - 1].frr);
  }
  for (const ThresholdRow& row : r.rows) {
    EXPECT_LE(row.fdrd_accepted, std::min(row.fd_accepted, row.rd_accepted));
    EXPECT_DOUBLE_EQ(row.fdrd_far, static_cast<double>(row.fdrd_accepted) / r.attack_sessions);
  }
  ASSERT_TRUE(r.calibrated_threshold && r.operating);
  EXPECT_LE(run.calibration.row_at(*r.calibrated_threshold).fdrd_far, 0.005);
  EXPECT_EQ(run.calibration.attack, "in_session");
  const OperatingPoint& p = *r.operating;
  EXPECT_DOUBLE_EQ(p.accuracy, 1.0 - double(p.false_accepts + p.false_rejects) / (r.genuine_sessions + r.attack_sessions));
  EXPECT_EQ(code_of([&] { calibrate_threshold(r, -1.0); }), ErrorCode::kNoThresholdSatisfies);
  EXPECT_EQ(code_of([&] { (void)r.row_at(5.0); }), ErrorCode::kConfigInvalid);
}

TEST(Experiment, MotionDecisionsOnlyRemoveAcceptances) {
  ExperimentConfig c = small_config();
  const Population pop = make_population(c);
  const SessionSet sessions = simulate_sessions(c, pop, enroll_population(c, pop));
  MotionDecisions fake;
  mathcore::RandomStream rng(1);
  fake.accept.assign(3, std::vector<std::vector<signed char>>(3, std::vector<signed char>(6, 0)));
  for (auto& a : fake.accept)
    for (auto& b : a)
      for (auto& s : b) s = rng.bernoulli(0.5);
  const EvalReport base = tally(c, sessions, nullptr);
  c.scheme = DefenseScheme::kMultimodal;
  const EvalReport mm = tally(c, sessions, &fake);
  for (std::size_t k = 0; k < base.rows.size(); ++k) {
    EXPECT_LE(mm.rows[k].fdrd_accepted, base.rows[k].fdrd_accepted);
    EXPECT_GE(mm.rows[k].genuine_rejected, base.rows[k].genuine_rejected);
  }
  EXPECT_EQ(code_of([&] { tally(c, sessions, nullptr); }), ErrorCode::kConfigInvalid);
}

TEST(Report, IdenticalSeedsGiveByteIdenticalReports) {
  const EvalReport a = run_experiment(small_config(11));
  const EvalReport b = run_experiment(small_config(11));
  const EvalReport other = run_experiment(small_config(12));
  EXPECT_EQ(report_json(a).dump(), report_json(b).dump());
  EXPECT_EQ(report_csv(a), report_csv(b));
  EXPECT_NE(report_json(a).dump(), report_json(other).dump());
  save_report(a, scratch("seed11-a"));
  save_report(b, scratch("seed11-b"));
  EXPECT_EQ(slurp(scratch("seed11-a.json")), slurp(scratch("seed11-b.json")));
  EXPECT_EQ(slurp(scratch("seed11-a.csv")), slurp(scratch("seed11-b.csv")));
}

TEST(Report, FileRoundTripIsExact) {
  EvalReport r = run_experiment(small_config(13));
  r.wall_time_s = 1.25;
  r.motion = MotionSummary{10, 0.97, 0.955, 0.9725, 7, 9};
  save_report(r, scratch("round"));
  const EvalReport back = load_report(scratch("round.json"));
  EXPECT_EQ(back, r);
  save_report(back, scratch("round2"));
  EXPECT_EQ(slurp(scratch("round.json")), slurp(scratch("round2.json")));
  EXPECT_EQ(slurp(scratch("round.csv")), slurp(scratch("round2.csv")));
  EXPECT_EQ(report_csv(r).substr(0, 37), "threshold,fd_far,rd_far,fdrd_far,frr\n");

  std::ofstream(scratch("bad.json")) << R"({"format": "abcauth-report/0"})";
  EXPECT_EQ(code_of([] { load_report(scratch("bad.json")); }), ErrorCode::kFormatVersionMismatch);
}

TEST(ProfileStore, RoundTripWithMotionFingerprints) {
  const ExperimentConfig c = small_config();
  const Population pop = make_population(c);
  protocol::DeviceProfileStore store = enroll_population(c, pop);
  mathcore::RandomStream rng(2);
  svm::MotionFingerprint rbf;
  rbf.kernel = svm::KernelKind::kRbf;
  rbf.dimension = 4;
  rbf.support_vectors = Eigen::MatrixXd::Random(3, 4);
  rbf.coefficients = Eigen::VectorXd::Random(3);
  rbf.bias = -0.125;
  rbf.c = 1e-4;
  rbf.gamma = 0.3;
  rbf.objective_history = {2.0, 1.5, 1.25};
  rbf.iterations = 42;
  store.at("device-1").motion = rbf;
  svm::MotionFingerprint lin;
  lin.dimension = 3;
  lin.weights = Eigen::Vector3d(0.1, -0.2, 1.0 / 3.0);
  store.at("device-2").motion = lin;

  save_profiles(store, scratch("profiles.json"));
  const protocol::DeviceProfileStore back = load_profiles(scratch("profiles.json"));
  ASSERT_EQ(back.ids(), store.ids());
  for (const auto& [id, p] : store.profiles()) {
    EXPECT_EQ(back.at(id).fingerprint.plane, p.fingerprint.plane);
    EXPECT_EQ(back.at(id).fingerprint.image_count, p.fingerprint.image_count);
    EXPECT_EQ(back.at(id).fingerprint.source, p.fingerprint.source);
    EXPECT_EQ(back.at(id).motion, p.motion);
  }
  save_profiles(back, scratch("profiles2.json"));
  EXPECT_EQ(slurp(scratch("profiles.json")), slurp(scratch("profiles2.json")));

  std::ofstream(scratch("wrong.json")) << R"({"format": "abcauth-devices/1", "profiles": []})";
  EXPECT_EQ(code_of([] { load_profiles(scratch("wrong.json")); }), ErrorCode::kFormatVersionMismatch);
  EXPECT_EQ(code_of([] { load_profiles("/nonexistent/p.json"); }), ErrorCode::kIoFailure);
}

TEST(ProfileStore, DeviceManifestRoundTrip) {
  const DeviceManifest m = make_manifest(small_config());
  save_manifest(m, scratch("devices.json"));
  const DeviceManifest back = load_manifest(scratch("devices.json"));
  EXPECT_EQ(back.devices, m.devices);
  EXPECT_EQ(back.config.dump(), m.config.dump());
  EXPECT_EQ(m.devices[0].camera_seed, derived_seed(3, "camera/device-1"));
}
