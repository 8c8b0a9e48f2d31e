#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace abcauth::svm {

enum class KernelKind { kLinear, kRbf };

std::string_view to_string(KernelKind kind);
KernelKind kernel_from_string(std::string_view text);

// Training objective, with n points and class weights c_i:
//
//   (1/n) sum_i c_i max(0, 1 - y_i f(x_i)) + C ||f||^2
//
// C multiplies the regulariser. The more common form puts a constant on the
// loss instead; the two are related by C_conventional = 1 / (2 n C).
struct SvmConfig {
  KernelKind kernel = KernelKind::kRbf;
  double c = 100.0;
  bool c_is_conventional = true;  // interpret `c` as C_conventional
  double gamma = 0.0;             // rbf width; 0 selects 1 / (d * var(features))
  bool balance_classes = true;    // weight positives by |neg| / |pos|
  double gap_tolerance = 1e-6;    // relative duality gap at which to stop
  std::int64_t max_iterations = 2'000'000;

  // Regulariser multiplier of the objective above for n training points.
  double objective_c(std::size_t n) const;
};

struct MotionFingerprint {
  KernelKind kernel = KernelKind::kLinear;
  int dimension = 0;
  Eigen::VectorXd weights;          // linear
  Eigen::MatrixXd support_vectors;  // rbf, one per row
  Eigen::VectorXd coefficients;     // rbf, alpha_i * y_i
  double bias = 0.0;
  double c = 0.0;                   // objective multiplier actually used
  double gamma = 0.0;
  std::vector<double> objective_history;
  std::int64_t iterations = 0;

  friend bool operator==(const MotionFingerprint&, const MotionFingerprint&) = default;
};

double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double gamma);

// Real-valued decision function. Throws DimensionMismatch.
double svm_score(const MotionFingerprint& fp, const Eigen::VectorXd& x);
// +1 when the score is strictly positive, -1 otherwise.
int svm_decide(const MotionFingerprint& fp, const Eigen::VectorXd& x);

// Objective above evaluated for the fingerprint on a labelled set.
double svm_objective(const MotionFingerprint& fp, const Eigen::MatrixXd& x, const std::vector<int>& y,
                     const std::vector<double>& weights);

// Rows are samples. Throws EmptyPositives / EmptyPool / DimensionMismatch.
MotionFingerprint svm_train(const Eigen::MatrixXd& positives, const Eigen::MatrixXd& pool, const SvmConfig& config);

// General labelled form (labels +1 / -1, explicit per-point loss weights).
MotionFingerprint svm_train_weighted(const Eigen::MatrixXd& x, const std::vector<int>& y,
                                     const std::vector<double>& weights, const SvmConfig& config);

// One binary machine per class (class k against all others); predicts the
// class with the largest score.
class OneVsRest {
 public:
  static OneVsRest train(const Eigen::MatrixXd& x, const std::vector<int>& labels, int class_count,
                         const SvmConfig& config);
  int predict(const Eigen::VectorXd& x) const;
  double accuracy(const Eigen::MatrixXd& x, const std::vector<int>& labels) const;
  const std::vector<MotionFingerprint>& machines() const noexcept { return machines_; }

 private:
  std::vector<MotionFingerprint> machines_;
};

}  // namespace abcauth::svm
