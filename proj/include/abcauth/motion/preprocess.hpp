#pragma once

#include <span>
#include <vector>

#include "abcauth/motion/recording.hpp"

namespace abcauth::motion {

struct PreprocessOptions {
  bool per_channel_rescale = true;   // false: one min-max over the whole 6x150 window
  bool interpolate_by_time = true;   // false: treat readings as evenly spaced
};

// Per channel: resample to 150 points over its own time span, subtract the
// minimum, divide by the L2 norm, then min-max into [0, 1]. A channel that is
// flat after the subtraction becomes all zeros. Throws TooFewSamples when a
// channel has fewer than two readings.
MotionSample preprocess(const RawMotionRecording& raw, const PreprocessOptions& options = {});

// Linear interpolation of (t, v) onto `count` evenly spaced points spanning
// [t.front(), t.back()].
std::vector<double> resample_linear(std::span<const double> t, std::span<const double> v, int count);

}  // namespace abcauth::motion
