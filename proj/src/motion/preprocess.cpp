#include "abcauth/motion/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "abcauth/common/error.hpp"

namespace abcauth::motion {

std::vector<double> resample_linear(std::span<const double> t, std::span<const double> v, int count) {
  const std::size_t n = t.size();
  if (n < 2 || v.size() != n) fail(ErrorCode::kTooFewSamples, "interpolation needs at least two readings");
  std::vector<double> out(count);
  const double t0 = t.front();
  const double t1 = t.back();
  std::size_t k = 0;
  for (int i = 0; i < count; ++i) {
    // Endpoints are taken verbatim so knots reproduce exactly.
    if (i == 0) {
      out[i] = v.front();
      continue;
    }
    if (i == count - 1) {
      out[i] = v.back();
      continue;
    }
    const double x = t0 + (t1 - t0) * i / (count - 1);
    while (k + 2 < n && t[k + 1] <= x) ++k;
    const double span = t[k + 1] - t[k];
    const double w = span > 0 ? (x - t[k]) / span : 0.0;
    out[i] = w == 0.0 ? v[k] : v[k] + w * (v[k + 1] - v[k]);
  }
  return out;
}

namespace {

void min_max(double* begin, double* end) {
  const auto [lo, hi] = std::minmax_element(begin, end);
  const double a = *lo;
  const double range = *hi - a;
  for (double* p = begin; p != end; ++p) *p = range > 0 ? std::clamp((*p - a) / range, 0.0, 1.0) : 0.0;
}

}  // namespace

MotionSample preprocess(const RawMotionRecording& raw, const PreprocessOptions& options) {
  Eigen::MatrixXd out(kChannelCount, kSampleLength);
  std::vector<double> index_axis;
  for (int c = 0; c < kChannelCount; ++c) {
    const MotionChannel& ch = raw.channels[c];
    if (ch.size() < 2 || ch.timestamps_ms.size() != ch.size()) {
      fail(ErrorCode::kTooFewSamples, std::string(channel_name(c)) + " has fewer than two readings");
    }
    std::span<const double> t = ch.timestamps_ms;
    if (!options.interpolate_by_time) {
      index_axis.resize(ch.size());
      std::iota(index_axis.begin(), index_axis.end(), 0.0);
      t = index_axis;
    }
    std::vector<double> x = resample_linear(t, ch.values, kSampleLength);
    const double lo = *std::min_element(x.begin(), x.end());
    for (double& e : x) e -= lo;
    const double norm = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    if (norm < 1e-12) {
      std::fill(x.begin(), x.end(), 0.0);
    } else {
      for (double& e : x) e /= norm;
    }
    if (options.per_channel_rescale) min_max(x.data(), x.data() + x.size());
    for (int i = 0; i < kSampleLength; ++i) out(c, i) = x[i];
  }
  if (!options.per_channel_rescale) min_max(out.data(), out.data() + out.size());
  return MotionSample(std::move(out));
}

}  // namespace abcauth::motion
