#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace abcauth::motion {

inline constexpr int kChannelCount = 6;
inline constexpr int kSampleLength = 150;
inline constexpr std::int64_t kWindowBeforeMs = 500;
inline constexpr std::int64_t kWindowAfterMs = 1000;

// Channel order: acc-x, acc-y, acc-z, gyr-x, gyr-y, gyr-z.
std::string_view channel_name(int channel);
// "acc"/"gyr" with axis "x"/"y"/"z"; -1 when not a motion channel.
int channel_index(std::string_view sensor, std::string_view axis);

struct MotionChannel {
  std::vector<double> timestamps_ms;  // strictly increasing
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
};

struct RawMotionRecording {
  std::string source_id;
  std::int64_t tap_ms = 0;
  std::array<MotionChannel, kChannelCount> channels;

  // Throws MalformedRow on mismatched lengths or non-increasing timestamps.
  void validate() const;
};

// Fixed-size preprocessed window, every entry in [0, 1].
class MotionSample {
 public:
  MotionSample() : values_(Eigen::MatrixXd::Zero(kChannelCount, kSampleLength)) {}
  // Throws ShapeMismatch on a wrong shape, DegenerateInput on values outside
  // [0, 1] or NaN.
  explicit MotionSample(Eigen::MatrixXd values);

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  double operator()(int channel, int index) const { return values_(channel, index); }

  friend bool operator==(const MotionSample& a, const MotionSample& b) { return a.values_ == b.values_; }

 private:
  Eigen::MatrixXd values_;
};

}  // namespace abcauth::motion
