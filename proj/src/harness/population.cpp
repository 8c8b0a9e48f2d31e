#include "abcauth/harness/population.hpp"

#include "abcauth/common/error.hpp"

namespace abcauth::harness {

std::uint64_t derived_seed(std::uint64_t master, std::string_view label) {
  return mathcore::RandomStream(master).derive(label).seed();
}

mathcore::RandomStream stream_for(std::uint64_t master, std::string_view label) {
  return mathcore::RandomStream(master).derive(label);
}

std::string device_id(int index) { return "device-" + std::to_string(index + 1); }

int Population::index_of(const std::string& id) const {
  for (std::size_t k = 0; k < cameras.size(); ++k) {
    if (cameras[k].id() == id) return static_cast<int>(k);
  }
  fail(ErrorCode::kUnknownDevice, "no device '" + id + "' in the population");
}

Population make_population(const ExperimentConfig& config) {
  config.validate();
  Population pop;
  const std::uint64_t s = config.seed;
  for (int k = 0; k < config.devices; ++k) {
    const std::string id = device_id(k);
    pop.cameras.push_back(camsim::CameraDevice::create(id, config.rows, config.cols, derived_seed(s, "camera/" + id),
                                                       config.sigma_fingerprint, config.sigma_shot));
    pop.phones.push_back(
        motion::MotionDeviceModel::create(id, derived_seed(s, "motion/" + id), config.motion.generator));
  }
  for (int k = 0; k < config.motion.extra_pretrain_devices; ++k) {
    const std::string id = "pretrain-" + std::to_string(k + 1);
    pop.pretrain_extras.push_back(
        motion::MotionDeviceModel::create(id, derived_seed(s, "motion/" + id), config.motion.generator));
  }
  for (int k = 0; k < config.motion.pool_devices; ++k) {
    const std::string id = "pool-" + std::to_string(k + 1);
    pop.pool.push_back(motion::MotionDeviceModel::create(id, derived_seed(s, "motion/" + id), config.motion.generator));
  }
  return pop;
}

}  // namespace abcauth::harness
