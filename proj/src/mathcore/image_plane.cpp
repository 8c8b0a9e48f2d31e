#include "abcauth/mathcore/image_plane.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "abcauth/common/error.hpp"

namespace abcauth::mathcore {

ImagePlane::ImagePlane(int rows, int cols, double fill) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) fail(ErrorCode::kDimensionMismatch, "image plane needs positive dimensions");
  data_.assign(static_cast<std::size_t>(rows) * cols, fill);
}

ImagePlane::ImagePlane(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows <= 0 || cols <= 0) fail(ErrorCode::kDimensionMismatch, "image plane needs positive dimensions");
  if (data_.size() != static_cast<std::size_t>(rows) * cols) {
    fail(ErrorCode::kDimensionMismatch, "image data length does not match rows*cols");
  }
  if (!all_finite()) fail(ErrorCode::kDegenerateInput, "image plane contains non-finite values");
}

double ImagePlane::mean() const {
  return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
}

double ImagePlane::sum_of_squares() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return s;
}

double ImagePlane::min() const { return *std::min_element(data_.begin(), data_.end()); }
double ImagePlane::max() const { return *std::max_element(data_.begin(), data_.end()); }

bool ImagePlane::is_constant() const {
  return std::all_of(data_.begin(), data_.end(), [&](double v) { return v == data_.front(); });
}

bool ImagePlane::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

ImagePlane ImagePlane::centered() const {
  ImagePlane out = *this;
  const double m = mean();
  for (double& v : out.data_) v -= m;
  return out;
}

ImagePlane& ImagePlane::operator+=(const ImagePlane& other) {
  require_same_shape(*this, other, "plane addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ImagePlane& ImagePlane::operator-=(const ImagePlane& other) {
  require_same_shape(*this, other, "plane subtraction");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ImagePlane& ImagePlane::operator*=(double scale) {
  for (double& v : data_) v *= scale;
  return *this;
}

ImagePlane operator+(ImagePlane a, const ImagePlane& b) { return a += b; }
ImagePlane operator-(ImagePlane a, const ImagePlane& b) { return a -= b; }
ImagePlane operator*(ImagePlane a, double scale) { return a *= scale; }

void require_same_shape(const ImagePlane& a, const ImagePlane& b, const char* what) {
  if (!a.same_shape(b)) {
    fail(ErrorCode::kDimensionMismatch,
         std::string(what) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
             " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

}  // namespace abcauth::mathcore
