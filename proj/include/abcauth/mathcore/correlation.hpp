#pragma once

#include <complex>
#include <vector>

#include "abcauth/mathcore/image_plane.hpp"

namespace abcauth::mathcore {

inline constexpr int kDefaultExclusionRadius = 5;

struct PceResult {
  double value = 0.0;
  int peak_row = 0;  // signed cyclic shift in [-rows/2, rows/2]
  int peak_col = 0;
};

// Half-spectrum of a mean-centered plane. Spectra are linear, so the spectrum
// of a difference of planes is the difference of their spectra; the verifier
// uses that to reuse transforms across the PCE values of one session.
class Spectrum {
 public:
  // Throws DegenerateInput for a constant plane.
  static Spectrum of(const ImagePlane& plane);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  bool same_shape(const Spectrum& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  const std::vector<std::complex<double>>& bins() const noexcept { return bins_; }

  Spectrum& operator-=(const Spectrum& other);
  friend Spectrum operator-(Spectrum a, const Spectrum& b) { return a -= b; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::complex<double>> bins_;
};

// Cyclic cross-correlation of the mean-centered inputs:
//   c(u, v) = sum_{i,j} a(i, j) * b((i + u) mod R, (j + v) mod C).
ImagePlane cross_correlate(const ImagePlane& a, const ImagePlane& b);
ImagePlane cross_correlate(const Spectrum& a, const Spectrum& b);

// Peak-to-correlation energy: squared peak of the correlation surface over the
// mean squared correlation outside a (2r+1)^2 square centred on the peak.
PceResult pce(const ImagePlane& a, const ImagePlane& b, int exclusion_radius = kDefaultExclusionRadius);
PceResult pce(const Spectrum& a, const Spectrum& b, int exclusion_radius = kDefaultExclusionRadius);
PceResult pce_of_surface(const ImagePlane& surface, int exclusion_radius = kDefaultExclusionRadius);

}  // namespace abcauth::mathcore
