#include "abcauth/mathcore/correlation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "abcauth/common/error.hpp"

namespace abcauth::mathcore {
namespace {

// FFTW plans for one plane size. FFTW_ESTIMATE keeps the chosen algorithm (and
// therefore every output bit) independent of runtime measurements.
class FftPlan {
 public:
  FftPlan(int rows, int cols) : rows_(rows), cols_(cols) {
    const std::size_t real_size = static_cast<std::size_t>(rows) * cols;
    const std::size_t half_size = static_cast<std::size_t>(rows) * (cols / 2 + 1);
    real_ = fftw_alloc_real(real_size);
    complex_ = fftw_alloc_complex(half_size);
    static std::mutex planner_mutex;
    std::lock_guard lock(planner_mutex);
    forward_ = fftw_plan_dft_r2c_2d(rows, cols, real_, complex_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_2d(rows, cols, complex_, real_, FFTW_ESTIMATE);
  }
  ~FftPlan() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    fftw_free(real_);
    fftw_free(complex_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::vector<std::complex<double>> forward(std::span<const double> input) {
    std::copy(input.begin(), input.end(), real_);
    fftw_execute(forward_);
    const std::size_t half = static_cast<std::size_t>(rows_) * (cols_ / 2 + 1);
    std::vector<std::complex<double>> out(half);
    for (std::size_t i = 0; i < half; ++i) out[i] = {complex_[i][0], complex_[i][1]};
    return out;
  }

  // Unnormalised inverse transform.
  std::vector<double> inverse(const std::vector<std::complex<double>>& bins) {
    for (std::size_t i = 0; i < bins.size(); ++i) {
      complex_[i][0] = bins[i].real();
      complex_[i][1] = bins[i].imag();
    }
    fftw_execute(inverse_);
    return std::vector<double>(real_, real_ + static_cast<std::size_t>(rows_) * cols_);
  }

 private:
  int rows_;
  int cols_;
  double* real_ = nullptr;
  fftw_complex* complex_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

FftPlan& plan_for(int rows, int cols) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<FftPlan>> plans;
  auto& slot = plans[{rows, cols}];
  if (!slot) slot = std::make_unique<FftPlan>(rows, cols);
  return *slot;
}

int signed_shift(int index, int extent) { return index > extent / 2 ? index - extent : index; }

}  // namespace

Spectrum Spectrum::of(const ImagePlane& plane) {
  if (plane.empty()) fail(ErrorCode::kDegenerateInput, "empty plane");
  if (plane.is_constant()) fail(ErrorCode::kDegenerateInput, "constant plane has no correlation structure");
  Spectrum s;
  s.rows_ = plane.rows();
  s.cols_ = plane.cols();
  const ImagePlane centered = plane.centered();
  s.bins_ = plan_for(s.rows_, s.cols_).forward(centered.values());
  s.bins_[0] = 0.0;  // exact zero mean
  return s;
}

Spectrum& Spectrum::operator-=(const Spectrum& other) {
  if (!same_shape(other)) fail(ErrorCode::kDimensionMismatch, "spectrum subtraction");
  for (std::size_t i = 0; i < bins_.size(); ++i) bins_[i] -= other.bins_[i];
  return *this;
}

ImagePlane cross_correlate(const Spectrum& a, const Spectrum& b) {
  if (!a.same_shape(b)) fail(ErrorCode::kDimensionMismatch, "cross-correlation inputs differ in shape");
  std::vector<std::complex<double>> product(a.bins().size());
  for (std::size_t i = 0; i < product.size(); ++i) product[i] = std::conj(a.bins()[i]) * b.bins()[i];
  std::vector<double> surface = plan_for(a.rows(), a.cols()).inverse(product);
  const double scale = 1.0 / (static_cast<double>(a.rows()) * a.cols());
  for (double& v : surface) v *= scale;
  return ImagePlane(a.rows(), a.cols(), std::move(surface));
}

ImagePlane cross_correlate(const ImagePlane& a, const ImagePlane& b) {
  require_same_shape(a, b, "cross-correlation");
  return cross_correlate(Spectrum::of(a), Spectrum::of(b));
}

PceResult pce_of_surface(const ImagePlane& surface, int exclusion_radius) {
  const int rows = surface.rows();
  const int cols = surface.cols();
  if (exclusion_radius < 0 || 2 * exclusion_radius + 1 >= rows || 2 * exclusion_radius + 1 >= cols) {
    fail(ErrorCode::kDimensionMismatch,
         "exclusion square of radius " + std::to_string(exclusion_radius) + " does not fit the plane");
  }
  int peak_r = 0;
  int peak_c = 0;
  double peak = surface(0, 0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (surface(r, c) > peak) {
        peak = surface(r, c);
        peak_r = r;
        peak_c = c;
      }
    }
  }
  auto cyclic_distance = [](int a, int b, int extent) {
    const int d = std::abs(a - b);
    return std::min(d, extent - d);
  };
  double energy_sum = 0.0;
  long long counted = 0;
  for (int r = 0; r < rows; ++r) {
    const bool row_near = cyclic_distance(r, peak_r, rows) <= exclusion_radius;
    for (int c = 0; c < cols; ++c) {
      if (row_near && cyclic_distance(c, peak_c, cols) <= exclusion_radius) continue;
      energy_sum += surface(r, c) * surface(r, c);
      ++counted;
    }
  }
  const double energy = energy_sum / static_cast<double>(counted);
  if (!(energy > 0.0)) fail(ErrorCode::kDegenerateInput, "correlation surface has no energy outside the peak");
  return PceResult{peak * peak / energy, signed_shift(peak_r, rows), signed_shift(peak_c, cols)};
}

PceResult pce(const Spectrum& a, const Spectrum& b, int exclusion_radius) {
  return pce_of_surface(cross_correlate(a, b), exclusion_radius);
}

PceResult pce(const ImagePlane& a, const ImagePlane& b, int exclusion_radius) {
  return pce_of_surface(cross_correlate(a, b), exclusion_radius);
}

}  // namespace abcauth::mathcore
