#include "abcauth/motion/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace abcauth::motion {

MotionDeviceModel MotionDeviceModel::create(std::string id, std::uint64_t seed, GeneratorNoise noise) {
  mathcore::RandomStream rng = mathcore::RandomStream(seed).derive("motion-signature");
  std::array<ChannelSignature, kChannelCount> sig;
  for (auto& ch : sig) {
    for (auto& comp : ch.components) {
      comp.frequency_hz = rng.uniform(1.0, 12.0);
      comp.amplitude = rng.uniform(0.2, 1.0);
      comp.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    ch.tap_amplitude = rng.uniform(-1.0, 1.0);
    ch.tap_decay_per_s = rng.uniform(5.0, 20.0);
  }
  return MotionDeviceModel(std::move(id), sig, noise, seed);
}

MotionDeviceModel::MotionDeviceModel(std::string id, std::array<ChannelSignature, kChannelCount> signature,
                                     GeneratorNoise noise, std::uint64_t seed)
    : id_(std::move(id)),
      signature_(signature),
      noise_(noise),
      rng_(mathcore::RandomStream(seed).derive("motion-windows")) {}

RawMotionRecording MotionDeviceModel::record_window(std::int64_t shutter_ms) {
  return record_window(shutter_ms, rng_);
}

RawMotionRecording MotionDeviceModel::record_window(std::int64_t shutter_ms, mathcore::RandomStream& rng) const {
  constexpr double kSpanMs = static_cast<double>(kWindowBeforeMs + kWindowAfterMs);
  RawMotionRecording rec;
  rec.source_id = id_;
  rec.tap_ms = shutter_ms;
  for (int c = 0; c < kChannelCount; ++c) {
    const ChannelSignature& sig = signature_[c];
    const int n = rng.uniform_int(140, 160);
    std::vector<double> offsets(n);  // ms relative to the shutter
    for (int i = 0; i < n; ++i) {
      offsets[i] = -static_cast<double>(kWindowBeforeMs) + i * kSpanMs / n;
      if (noise_.timestamp_std_ms > 0) offsets[i] += rng.normal(0.0, noise_.timestamp_std_ms);
    }
    std::sort(offsets.begin(), offsets.end());
    for (int i = 1; i < n; ++i) {
      if (offsets[i] <= offsets[i - 1] + 1e-3) offsets[i] = offsets[i - 1] + 1e-3;
    }

    std::array<double, 3> phase{}, amp{};
    for (int k = 0; k < 3; ++k) {
      phase[k] = sig.components[k].phase + (noise_.phase_std > 0 ? rng.normal(0.0, noise_.phase_std) : 0.0);
      amp[k] = sig.components[k].amplitude *
               (1.0 + (noise_.amplitude_rel > 0 ? rng.normal(0.0, noise_.amplitude_rel) : 0.0));
    }

    MotionChannel& ch = rec.channels[c];
    ch.timestamps_ms.resize(n);
    ch.values.resize(n);
    for (int i = 0; i < n; ++i) {
      const double t = offsets[i] / 1000.0;
      double v = 0.0;
      for (int k = 0; k < 3; ++k) {
        v += amp[k] * std::sin(2.0 * std::numbers::pi * sig.components[k].frequency_hz * t + phase[k]);
      }
      if (t >= 0.0) v += sig.tap_amplitude * std::exp(-sig.tap_decay_per_s * t);
      if (noise_.value_std > 0) v += rng.normal(0.0, noise_.value_std);
      ch.timestamps_ms[i] = static_cast<double>(shutter_ms) + offsets[i];
      ch.values[i] = v;
    }
  }
  return rec;
}

}  // namespace abcauth::motion
