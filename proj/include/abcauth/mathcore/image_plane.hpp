#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace abcauth::mathcore {

// Row-major real matrix. Carries photos, code planes, fingerprints, probes and
// residues alike.
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(int rows, int cols, double fill = 0.0);
  ImagePlane(int rows, int cols, std::vector<double> data);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const ImagePlane& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  double mean() const;
  double sum_of_squares() const;
  double min() const;
  double max() const;
  bool is_constant() const;
  bool all_finite() const;

  // Copy with the arithmetic mean removed.
  ImagePlane centered() const;

  ImagePlane& operator+=(const ImagePlane& other);
  ImagePlane& operator-=(const ImagePlane& other);
  ImagePlane& operator*=(double scale);

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

ImagePlane operator+(ImagePlane a, const ImagePlane& b);
ImagePlane operator-(ImagePlane a, const ImagePlane& b);
ImagePlane operator*(ImagePlane a, double scale);

// Throws DimensionMismatch when shapes differ.
void require_same_shape(const ImagePlane& a, const ImagePlane& b, const char* what);

}  // namespace abcauth::mathcore
