#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "abcauth/common/error.hpp"
#include "abcauth/mathcore/random_stream.hpp"
#include "abcauth/svm/svm.hpp"
#include "oracles.hpp"

using namespace abcauth;
using namespace abcauth::svm;
using mathcore::RandomStream;

namespace {

SvmConfig linear_config(double lambda) {
  SvmConfig c;
  c.kernel = KernelKind::kLinear;
  c.c = lambda;
  c.c_is_conventional = false;
  c.balance_classes = false;
  c.gap_tolerance = 1e-9;
  return c;
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

TEST(SvmSolver, MatchesBruteForceOnSmallInstances) {
  RandomStream rng(1);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 6 + trial;  // up to 17 points
    const oracle::SvmProblem p = oracle::random_svm_problem(rng, n);
    const double lambda = std::pow(10.0, rng.uniform(-2.5, 0.0));
    const std::vector<double> w(n, 1.0);
    const MotionFingerprint fp = svm_train_weighted(p.x, p.y, w, linear_config(lambda));
    const double solved = svm_objective(fp, p.x, p.y, w);
    const double direct = oracle::svm_objective_2d(fp.weights(0), fp.weights(1), fp.bias, p.x, p.y, lambda);
    EXPECT_NEAR(solved, direct, 1e-12);
    EXPECT_NEAR(solved, oracle::svm_brute_force(p.x, p.y, lambda), 1e-4) << "trial " << trial << " n " << n;
  }
}

TEST(SvmSolver, TwentyPointInstance) {
  RandomStream rng(2);
  const oracle::SvmProblem p = oracle::random_svm_problem(rng, 20);
  const std::vector<double> w(20, 1.0);
  const MotionFingerprint fp = svm_train_weighted(p.x, p.y, w, linear_config(0.05));
  EXPECT_NEAR(svm_objective(fp, p.x, p.y, w), oracle::svm_brute_force(p.x, p.y, 0.05), 1e-4);
}

TEST(SvmSolver, ObjectiveHistoryIsMonotone) {
  RandomStream rng(3);
  for (KernelKind kind : {KernelKind::kLinear, KernelKind::kRbf}) {
    const oracle::SvmProblem p = oracle::random_svm_problem(rng, 60);
    SvmConfig cfg = linear_config(0.01);
    cfg.kernel = kind;
    cfg.gamma = 0.5;
    const MotionFingerprint fp = svm_train_weighted(p.x, p.y, std::vector<double>(60, 1.0), cfg);
    ASSERT_GE(fp.objective_history.size(), 2u);
    for (std::size_t k = 1; k < fp.objective_history.size(); ++k)
      ASSERT_LE(fp.objective_history[k], fp.objective_history[k - 1] + 1e-12);
  }
}

TEST(SvmSolver, SeparableToySet) {
  Eigen::MatrixXd pos(2, 2), neg(2, 2);
  pos << 1, 1, 2, 2;
  neg << -1, -1, -2, -2;
  SvmConfig rbf;  // defaults
  SvmConfig lin = linear_config(1e-3);
  lin.balance_classes = true;
  for (const SvmConfig& cfg : {rbf, lin}) {
    const MotionFingerprint fp = svm_train(pos, neg, cfg);
    for (int i = 0; i < 2; ++i) {
      EXPECT_EQ(svm_decide(fp, pos.row(i).transpose()), 1);
      EXPECT_EQ(svm_decide(fp, neg.row(i).transpose()), -1);
    }
  }
  const MotionFingerprint fp = svm_train(pos, neg, lin);
  for (int i = 0; i < 2; ++i) {
    EXPECT_GE(svm_score(fp, pos.row(i).transpose()), 1.0 - 1e-6);
    EXPECT_LE(svm_score(fp, neg.row(i).transpose()), -1.0 + 1e-6);
  }
}

TEST(SvmSolver, DuplicatingEveryPointKeepsTheDecisionFunction) {
  RandomStream rng(4);
  const oracle::SvmProblem p = oracle::random_svm_problem(rng, 14);
  Eigen::MatrixXd x2(28, 2);
  x2 << p.x, p.x;
  std::vector<int> y2 = p.y;
  y2.insert(y2.end(), p.y.begin(), p.y.end());
  for (KernelKind kind : {KernelKind::kLinear, KernelKind::kRbf}) {
    SvmConfig cfg = linear_config(0.02);
    cfg.kernel = kind;
    cfg.gamma = 0.7;
    cfg.gap_tolerance = 1e-10;
    const MotionFingerprint a = svm_train_weighted(p.x, p.y, std::vector<double>(14, 1.0), cfg);
    const MotionFingerprint b = svm_train_weighted(x2, y2, std::vector<double>(28, 1.0), cfg);
    for (int k = 0; k < 50; ++k) {
      const Eigen::Vector2d q(rng.normal(), rng.normal());
      EXPECT_NEAR(svm_score(a, q), svm_score(b, q), 1e-4);
    }
  }
}

TEST(SvmSolver, HeavyRegularisationShrinksWeights) {
  RandomStream rng(5);
  const oracle::SvmProblem p = oracle::random_svm_problem(rng, 16);
  const MotionFingerprint fp = svm_train_weighted(p.x, p.y, std::vector<double>(16, 1.0), linear_config(1e6));
  EXPECT_LT(fp.weights.norm(), 1e-5);
  for (int k = 0; k < 20; ++k) EXPECT_NEAR(svm_score(fp, Eigen::Vector2d(rng.normal(), rng.normal())), fp.bias, 1e-4);
}

TEST(SvmSolver, BalancedWeightsRescueAFewPositives) {
  RandomStream rng(6);
  Eigen::MatrixXd pos(5, 8), pool(200, 8);
  for (int i = 0; i < 5; ++i)
    for (int d = 0; d < 8; ++d) pos(i, d) = rng.normal(1.0, 0.3);
  for (int i = 0; i < 200; ++i)
    for (int d = 0; d < 8; ++d) pool(i, d) = rng.normal(0.0, 0.5);
  // Soft margin: without reweighting the five positives are outvoted.
  SvmConfig cfg;
  cfg.kernel = KernelKind::kLinear;
  cfg.c = 0.01;
  const MotionFingerprint fp = svm_train(pos, pool, cfg);
  cfg.balance_classes = false;
  const MotionFingerprint plain = svm_train(pos, pool, cfg);
  int hits = 0, rejects = 0, plain_hits = 0;
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd a(8), b(8);
    for (int d = 0; d < 8; ++d) {
      a(d) = rng.normal(1.0, 0.3);
      b(d) = rng.normal(0.0, 0.5);
    }
    hits += svm_decide(fp, a) == 1;
    plain_hits += svm_decide(plain, a) == 1;
    rejects += svm_decide(fp, b) == -1;
  }
  EXPECT_GE(hits, 95);
  EXPECT_GE(rejects, 95);
  EXPECT_LT(plain_hits, 50);
}

TEST(SvmDecide, HandBuiltHyperplaneAndFailClosed) {
  MotionFingerprint fp;
  fp.kernel = KernelKind::kLinear;
  fp.dimension = 3;
  fp.weights = Eigen::Vector3d(1, 0, 0);
  EXPECT_EQ(svm_decide(fp, Eigen::Vector3d(3, 0, 0)), 1);
  EXPECT_EQ(svm_decide(fp, Eigen::Vector3d(0, 5, 5)), -1);  // exact tie rejects
  MotionFingerprint scaled = fp;
  scaled.weights *= 7.5;
  scaled.bias = 7.5 * -0.5;
  fp.bias = -0.5;
  RandomStream rng(7);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Vector3d q(rng.normal(), rng.normal(), rng.normal());
    EXPECT_EQ(svm_decide(fp, q), svm_decide(scaled, q));
  }
  MotionFingerprint zero;
  zero.dimension = 3;
  zero.weights = Eigen::Vector3d::Zero();
  for (int k = 0; k < 20; ++k) EXPECT_EQ(svm_decide(zero, Eigen::Vector3d(rng.normal(), rng.normal(), 1.0)), -1);
  EXPECT_EQ(code_of([&] { svm_score(fp, Eigen::Vector2d(1, 1)); }), ErrorCode::kDimensionMismatch);
}

TEST(SvmTrain, InputErrors) {
  const Eigen::MatrixXd some = Eigen::MatrixXd::Ones(3, 2), none(0, 2);
  EXPECT_EQ(code_of([&] { svm_train(none, some, SvmConfig{}); }), ErrorCode::kEmptyPositives);
  EXPECT_EQ(code_of([&] { svm_train(some, none, SvmConfig{}); }), ErrorCode::kEmptyPool);
  EXPECT_EQ(code_of([&] { svm_train(some, Eigen::MatrixXd::Ones(3, 4), SvmConfig{}); }), ErrorCode::kDimensionMismatch);
}

TEST(SvmConfig, ConventionMapping) {
  SvmConfig c;
  c.c = 100.0;
  EXPECT_DOUBLE_EQ(c.objective_c(205), 1.0 / (2.0 * 205 * 100.0));
  c.c_is_conventional = false;
  c.c = 0.3;
  EXPECT_DOUBLE_EQ(c.objective_c(205), 0.3);
  for (KernelKind k : {KernelKind::kLinear, KernelKind::kRbf}) EXPECT_EQ(kernel_from_string(to_string(k)), k);
}

TEST(OneVsRest, SeparatesBlobs) {
  RandomStream rng(8);
  Eigen::MatrixXd x(150, 4), t(60, 4);
  std::vector<int> y, yt;
  auto fill = [&](Eigen::MatrixXd& m, std::vector<int>& labels) {
    for (int i = 0; i < m.rows(); ++i) {
      const int c = i % 3;
      for (int d = 0; d < 4; ++d) m(i, d) = rng.normal(d == c ? 2.0 : 0.0, 0.5);
      labels.push_back(c);
    }
  };
  fill(x, y);
  fill(t, yt);
  const OneVsRest ovr = OneVsRest::train(x, y, 3, SvmConfig{});
  EXPECT_EQ(ovr.machines().size(), 3u);
  EXPECT_GE(ovr.accuracy(t, yt), 0.95);
}
