#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "abcauth/camsim/camera.hpp"
#include "abcauth/harness/config.hpp"
#include "abcauth/motion/generator.hpp"

namespace abcauth::harness {

// Seed of the child stream `label` under the master seed.
std::uint64_t derived_seed(std::uint64_t master, std::string_view label);
mathcore::RandomStream stream_for(std::uint64_t master, std::string_view label);

// Every simulated device of one experiment. Camera k and motion model k
// belong to the same phone ("device-<k+1>"). Pretraining extras and pool
// devices never take part in sessions.
struct Population {
  std::vector<camsim::CameraDevice> cameras;
  std::vector<motion::MotionDeviceModel> phones;
  std::vector<motion::MotionDeviceModel> pretrain_extras;
  std::vector<motion::MotionDeviceModel> pool;

  int index_of(const std::string& device_id) const;  // throws UnknownDevice
};

std::string device_id(int index);
Population make_population(const ExperimentConfig& config);

}  // namespace abcauth::harness
