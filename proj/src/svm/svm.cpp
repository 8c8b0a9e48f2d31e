#include "abcauth/svm/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "abcauth/common/error.hpp"

namespace abcauth::svm {

std::string_view to_string(KernelKind kind) { return kind == KernelKind::kLinear ? "linear" : "rbf"; }

KernelKind kernel_from_string(std::string_view text) {
  if (text == "linear") return KernelKind::kLinear;
  if (text == "rbf") return KernelKind::kRbf;
  fail(ErrorCode::kConfigInvalid, "unknown kernel '" + std::string(text) + "'");
}

double SvmConfig::objective_c(std::size_t n) const {
  if (!(c > 0)) fail(ErrorCode::kConfigInvalid, "SVM C must be positive");
  return c_is_conventional ? 1.0 / (2.0 * static_cast<double>(n) * c) : c;
}

double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double gamma) {
  return std::exp(-gamma * (a - b).squaredNorm());
}

double svm_score(const MotionFingerprint& fp, const Eigen::VectorXd& x) {
  if (x.size() != fp.dimension) {
    fail(ErrorCode::kDimensionMismatch, "embedding has " + std::to_string(x.size()) + " entries, fingerprint expects " +
                                            std::to_string(fp.dimension));
  }
  if (fp.kernel == KernelKind::kLinear) return fp.weights.dot(x) + fp.bias;
  double s = fp.bias;
  for (Eigen::Index k = 0; k < fp.support_vectors.rows(); ++k) {
    s += fp.coefficients[k] * std::exp(-fp.gamma * (fp.support_vectors.row(k).transpose() - x).squaredNorm());
  }
  return s;
}

int svm_decide(const MotionFingerprint& fp, const Eigen::VectorXd& x) { return svm_score(fp, x) > 0.0 ? 1 : -1; }

namespace {

// min over b of sum_i u_i max(0, 1 - y_i (s_i + b)); returns {value, b}.
//
// Breakpoints sit at b = y_i - s_i. The slope starts at -sum(u over
// positives) and rises by u_i at every breakpoint.
struct BiasScratch {
  std::vector<std::pair<double, double>> knots;
};

std::pair<double, double> best_bias(const Eigen::VectorXd& s, const std::vector<int>& y, const Eigen::VectorXd& u,
                                    BiasScratch& scratch) {
  const Eigen::Index n = s.size();
  auto& knots = scratch.knots;
  knots.resize(static_cast<std::size_t>(n));
  double slope = 0.0, total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    knots[i] = {y[i] - s[i], u[i]};
    if (y[i] > 0) slope -= u[i];
    total += u[i];
  }
  std::sort(knots.begin(), knots.end());
  double b = knots.front().first;
  if (slope < 0) {
    for (std::size_t k = 0; k < knots.size(); ++k) {
      slope += knots[k].second;
      if (slope >= -1e-13 * total) {
        b = knots[k].first;
        if (std::abs(slope) <= 1e-13 * total && k + 1 < knots.size()) b = 0.5 * (knots[k].first + knots[k + 1].first);
        break;
      }
    }
  }
  double value = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) value += u[i] * std::max(0.0, 1.0 - y[i] * (s[i] + b));
  return {value, b};
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x, KernelKind kind, double gamma) {
  Eigen::MatrixXd gram = x * x.transpose();
  if (kind == KernelKind::kLinear) return gram;
  const Eigen::VectorXd sq = gram.diagonal();
  Eigen::MatrixXd k(gram.rows(), gram.cols());
  for (Eigen::Index j = 0; j < gram.cols(); ++j) {
    for (Eigen::Index i = 0; i < gram.rows(); ++i) {
      k(i, j) = std::exp(-gamma * std::max(0.0, sq[i] + sq[j] - 2.0 * gram(i, j)));
    }
  }
  return k;
}

}  // namespace

double svm_objective(const MotionFingerprint& fp, const Eigen::MatrixXd& x, const std::vector<int>& y,
                     const std::vector<double>& weights) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (y.size() != n || weights.size() != n) fail(ErrorCode::kDimensionMismatch, "label/weight count mismatch");
  double reg;
  if (fp.kernel == KernelKind::kLinear) {
    reg = fp.weights.squaredNorm();
  } else {
    const Eigen::MatrixXd k = kernel_matrix(fp.support_vectors, KernelKind::kRbf, fp.gamma);
    reg = fp.coefficients.dot(k * fp.coefficients);
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    loss += weights[i] * std::max(0.0, 1.0 - y[i] * svm_score(fp, x.row(static_cast<Eigen::Index>(i)).transpose()));
  }
  return loss / static_cast<double>(n) + fp.c * reg;
}

MotionFingerprint svm_train_weighted(const Eigen::MatrixXd& x, const std::vector<int>& y,
                                     const std::vector<double>& weights, const SvmConfig& config) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n == 0) fail(ErrorCode::kEmptyPositives, "no training points");
  if (static_cast<Eigen::Index>(y.size()) != n || static_cast<Eigen::Index>(weights.size()) != n) {
    fail(ErrorCode::kDimensionMismatch, "label/weight count mismatch");
  }
  bool any_pos = false, any_neg = false;
  for (int v : y) {
    if (v == 1) {
      any_pos = true;
    } else if (v == -1) {
      any_neg = true;
    } else {
      fail(ErrorCode::kConfigInvalid, "labels must be +1 or -1");
    }
  }
  if (!any_pos) fail(ErrorCode::kEmptyPositives, "no positive examples");
  if (!any_neg) fail(ErrorCode::kEmptyPool, "no negative examples");

  MotionFingerprint fp;
  fp.kernel = config.kernel;
  fp.dimension = static_cast<int>(d);
  fp.c = config.objective_c(static_cast<std::size_t>(n));
  if (config.kernel == KernelKind::kRbf) {
    if (config.gamma > 0) {
      fp.gamma = config.gamma;
    } else {
      const double mean = x.mean();
      const double var = (x.array() - mean).square().mean();
      fp.gamma = var > 0 ? 1.0 / (static_cast<double>(d) * var) : 1.0;
    }
  }

  const Eigen::MatrixXd k = kernel_matrix(x, config.kernel, fp.gamma);
  Eigen::VectorXd u(n);  // box bounds of the dual
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(weights[i] > 0)) fail(ErrorCode::kConfigInvalid, "point weights must be positive");
    u[i] = weights[i] / (2.0 * fp.c * static_cast<double>(n));
  }

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);  // Q alpha - 1
  Eigen::VectorXd yv(n);
  for (Eigen::Index i = 0; i < n; ++i) yv[i] = y[i];

  // Primal iterate: coefficients beta with scores s = K beta, and its bias.
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd s_p = Eigen::VectorXd::Zero(n);
  BiasScratch scratch;
  double b_p = best_bias(s_p, y, u, scratch).second;
  const double scale = 2.0 * fp.c;  // printed objective = scale * (scaled primal)

  auto scaled_primal = [&](const Eigen::VectorXd& s, double quad) {
    auto [loss, b] = best_bias(s, y, u, scratch);
    return std::pair{0.5 * quad + loss, b};
  };

  // Moves the primal iterate toward the point induced by alpha when that
  // lowers the objective. Returns the (relative) duality gap.
  auto refresh_primal = [&]() {
    const Eigen::VectorXd beta_d = alpha.cwiseProduct(yv);
    const Eigen::VectorXd s_d = yv.cwiseProduct((grad.array() + 1.0).matrix());
    const double a = beta.dot(s_p);
    const double pd = beta.dot(s_d);
    const double dd = beta_d.dot(s_d);
    const Eigen::VectorXd ds = s_d - s_p;
    auto h = [&](double t) {
      const double quad = a + 2.0 * t * (pd - a) + t * t * (dd - 2.0 * pd + a);
      return scaled_primal(s_p + t * ds, std::max(0.0, quad));
    };
    constexpr double kPhi = 0.6180339887498949;
    double lo = 0.0, hi = 1.0;
    double x1 = hi - kPhi * (hi - lo), x2 = lo + kPhi * (hi - lo);
    double f1 = h(x1).first, f2 = h(x2).first;
    for (int it = 0; it < 60; ++it) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kPhi * (hi - lo);
        f1 = h(x1).first;
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kPhi * (hi - lo);
        f2 = h(x2).first;
      }
    }
    double best_t = 0.0;
    auto best = h(0.0);
    for (double t : {0.5 * (lo + hi), 1.0}) {
      auto cand = h(t);
      if (cand.first < best.first) {
        best = cand;
        best_t = t;
      }
    }
    if (best_t > 0.0) {
      beta += best_t * (beta_d - beta);
      s_p += best_t * ds;
    }
    b_p = best.second;
    const double primal = best.first;
    const double dual = alpha.sum() - 0.5 * dd;
    fp.objective_history.push_back(scale * primal);
    return scale * (primal - dual) / std::max(1.0, scale * std::abs(primal));
  };

  constexpr double kTau = 1e-12;
  const std::int64_t check_every = std::max<std::int64_t>(10, n / 10);
  std::int64_t iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  while (iter < config.max_iterations) {
    // Maximal-violating i, then second-order choice of j.
    double gmax = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      const bool up = (yv[t] > 0 && alpha[t] < u[t]) || (yv[t] < 0 && alpha[t] > 0);
      if (up && -yv[t] * grad[t] >= gmax) {
        gmax = -yv[t] * grad[t];
        i = t;
      }
    }
    double gmin = std::numeric_limits<double>::infinity();
    Eigen::Index j = -1;
    double best_obj = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n && i >= 0; ++t) {
      const bool low = (yv[t] > 0 && alpha[t] > 0) || (yv[t] < 0 && alpha[t] < u[t]);
      if (!low) continue;
      const double v = -yv[t] * grad[t];
      gmin = std::min(gmin, v);
      const double b = gmax - v;
      if (b > 0) {
        double a = k(i, i) + k(t, t) - 2.0 * k(i, t);
        if (a <= 0) a = kTau;
        const double obj = -(b * b) / a;
        if (obj <= best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    const bool kkt_done = i < 0 || j < 0 || gmax - gmin < 1e-12;
    if (kkt_done || iter % check_every == 0) {
      gap = refresh_primal();
      if (gap <= config.gap_tolerance || kkt_done) break;
    }

    const double yi = yv[i], yj = yv[j];
    const double ci = u[i], cj = u[j];
    const double old_i = alpha[i], old_j = alpha[j];
    double quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
    if (quad <= 0) quad = kTau;
    if (yi != yj) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > ci - cj) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = ci - diff;
        }
      } else if (alpha[j] > cj) {
        alpha[j] = cj;
        alpha[i] = cj + diff;
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > ci) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = sum - ci;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > cj) {
        if (alpha[j] > cj) {
          alpha[j] = cj;
          alpha[i] = sum - cj;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (Eigen::Index t = 0; t < n; ++t) {
      grad[t] += yv[t] * (yi * k(t, i) * di + yj * k(t, j) * dj);
    }
    ++iter;
  }
  if (iter >= config.max_iterations) refresh_primal();
  fp.iterations = iter;
  fp.bias = b_p;

  if (config.kernel == KernelKind::kLinear) {
    fp.weights = x.transpose() * beta;
  } else {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (beta[t] != 0.0) keep.push_back(t);
    }
    fp.support_vectors.resize(static_cast<Eigen::Index>(keep.size()), d);
    fp.coefficients.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t r = 0; r < keep.size(); ++r) {
      fp.support_vectors.row(static_cast<Eigen::Index>(r)) = x.row(keep[r]);
      fp.coefficients[static_cast<Eigen::Index>(r)] = beta[keep[r]];
    }
  }
  return fp;
}

MotionFingerprint svm_train(const Eigen::MatrixXd& positives, const Eigen::MatrixXd& pool, const SvmConfig& config) {
  if (positives.rows() == 0) fail(ErrorCode::kEmptyPositives, "no positive embeddings");
  if (pool.rows() == 0) fail(ErrorCode::kEmptyPool, "negative pool is empty");
  if (positives.cols() != pool.cols()) fail(ErrorCode::kDimensionMismatch, "positive and pool widths differ");
  const Eigen::Index np = positives.rows(), nn = pool.rows();
  Eigen::MatrixXd x(np + nn, positives.cols());
  x << positives, pool;
  std::vector<int> y(static_cast<std::size_t>(np + nn), -1);
  std::fill(y.begin(), y.begin() + np, 1);
  const double wpos = config.balance_classes ? static_cast<double>(nn) / static_cast<double>(np) : 1.0;
  std::vector<double> w(y.size(), 1.0);
  std::fill(w.begin(), w.begin() + np, wpos);
  return svm_train_weighted(x, y, w, config);
}

OneVsRest OneVsRest::train(const Eigen::MatrixXd& x, const std::vector<int>& labels, int class_count,
                           const SvmConfig& config) {
  if (static_cast<Eigen::Index>(labels.size()) != x.rows()) fail(ErrorCode::kDimensionMismatch, "label count mismatch");
  OneVsRest out;
  for (int c = 0; c < class_count; ++c) {
    std::vector<Eigen::Index> pos, neg;
    for (Eigen::Index i = 0; i < x.rows(); ++i) (labels[i] == c ? pos : neg).push_back(i);
    Eigen::MatrixXd p(static_cast<Eigen::Index>(pos.size()), x.cols());
    Eigen::MatrixXd q(static_cast<Eigen::Index>(neg.size()), x.cols());
    for (std::size_t r = 0; r < pos.size(); ++r) p.row(static_cast<Eigen::Index>(r)) = x.row(pos[r]);
    for (std::size_t r = 0; r < neg.size(); ++r) q.row(static_cast<Eigen::Index>(r)) = x.row(neg[r]);
    out.machines_.push_back(svm_train(p, q, config));
  }
  return out;
}

int OneVsRest::predict(const Eigen::VectorXd& x) const {
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < machines_.size(); ++c) {
    const double s = svm_score(machines_[c], x);
    if (s > best_score) {
      best_score = s;
      best = static_cast<int>(c);
    }
  }
  return best;
}

double OneVsRest::accuracy(const Eigen::MatrixXd& x, const std::vector<int>& labels) const {
  if (x.rows() == 0) return 0.0;
  std::size_t ok = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) ok += predict(x.row(i).transpose()) == labels[i] ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(x.rows());
}

}  // namespace abcauth::svm
