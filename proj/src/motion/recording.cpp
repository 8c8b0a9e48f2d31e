#include "abcauth/motion/recording.hpp"

#include <cmath>

#include "abcauth/common/error.hpp"

namespace abcauth::motion {

namespace {
constexpr std::string_view kNames[kChannelCount] = {"acc-x", "acc-y", "acc-z", "gyr-x", "gyr-y", "gyr-z"};
}

std::string_view channel_name(int channel) {
  if (channel < 0 || channel >= kChannelCount) fail(ErrorCode::kShapeMismatch, "channel index out of range");
  return kNames[channel];
}

int channel_index(std::string_view sensor, std::string_view axis) {
  int base;
  if (sensor == "acc") {
    base = 0;
  } else if (sensor == "gyr") {
    base = 3;
  } else {
    return -1;
  }
  if (axis == "x") return base;
  if (axis == "y") return base + 1;
  if (axis == "z") return base + 2;
  return -1;
}

void RawMotionRecording::validate() const {
  for (int c = 0; c < kChannelCount; ++c) {
    const auto& ch = channels[c];
    if (ch.timestamps_ms.size() != ch.values.size()) {
      fail(ErrorCode::kMalformedRow, std::string(kNames[c]) + ": timestamp/value count mismatch");
    }
    for (std::size_t i = 1; i < ch.size(); ++i) {
      if (!(ch.timestamps_ms[i] > ch.timestamps_ms[i - 1])) {
        fail(ErrorCode::kMalformedRow, std::string(kNames[c]) + ": timestamps not strictly increasing");
      }
    }
  }
}

MotionSample::MotionSample(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() != kChannelCount || values_.cols() != kSampleLength) {
    fail(ErrorCode::kShapeMismatch, "motion sample must be 6x150");
  }
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    const double v = values_.data()[i];
    if (std::isnan(v) || v < 0.0 || v > 1.0) fail(ErrorCode::kDegenerateInput, "motion sample value outside [0,1]");
  }
}

}  // namespace abcauth::motion
