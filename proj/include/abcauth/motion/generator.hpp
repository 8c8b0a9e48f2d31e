#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "abcauth/mathcore/random_stream.hpp"
#include "abcauth/motion/recording.hpp"

namespace abcauth::motion {

struct SinusoidComponent {
  double frequency_hz = 1.0;
  double amplitude = 0.0;
  double phase = 0.0;
};

struct ChannelSignature {
  std::array<SinusoidComponent, 3> components;
  double tap_amplitude = 0.0;  // impulse at the shutter, decaying exponentially
  double tap_decay_per_s = 10.0;
};

struct GeneratorNoise {
  double value_std = 0.1;       // additive jitter on every reading
  double phase_std = 0.5;       // per-window phase wobble, radians
  double amplitude_rel = 0.1;   // per-window relative amplitude wobble
  double timestamp_std_ms = 1.0;
};

// Synthetic per-device motion signature.
class MotionDeviceModel {
 public:
  // Frequencies in [1, 12] Hz, amplitudes in [0.2, 1], phases uniform, drawn
  // from a stream derived from the seed.
  static MotionDeviceModel create(std::string id, std::uint64_t seed, GeneratorNoise noise = {});
  MotionDeviceModel(std::string id, std::array<ChannelSignature, kChannelCount> signature, GeneratorNoise noise,
                    std::uint64_t seed);

  const std::string& id() const noexcept { return id_; }
  const std::array<ChannelSignature, kChannelCount>& signature() const noexcept { return signature_; }
  const GeneratorNoise& noise() const noexcept { return noise_; }

  // 0.5 s before to 1.0 s after the shutter, 140-160 readings per channel.
  RawMotionRecording record_window(std::int64_t shutter_ms);
  RawMotionRecording record_window(std::int64_t shutter_ms, mathcore::RandomStream& rng) const;

 private:
  std::string id_;
  std::array<ChannelSignature, kChannelCount> signature_;
  GeneratorNoise noise_;
  mathcore::RandomStream rng_;
};

}  // namespace abcauth::motion
