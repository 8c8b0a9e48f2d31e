#include "abcauth/protocol/profile.hpp"

#include "abcauth/common/error.hpp"

namespace abcauth::protocol {

const DeviceProfile& DeviceProfileStore::at(const std::string& device_id) const {
  auto it = profiles_.find(device_id);
  if (it == profiles_.end()) fail(ErrorCode::kUnknownDevice, "no profile for device '" + device_id + "'");
  return it->second;
}

DeviceProfile& DeviceProfileStore::at(const std::string& device_id) {
  auto it = profiles_.find(device_id);
  if (it == profiles_.end()) fail(ErrorCode::kUnknownDevice, "no profile for device '" + device_id + "'");
  return it->second;
}

void DeviceProfileStore::insert(DeviceProfile profile) {
  if (profiles_.contains(profile.device_id)) {
    fail(ErrorCode::kDuplicateDevice, "device '" + profile.device_id + "' already registered");
  }
  std::string key = profile.device_id;
  profiles_.emplace(std::move(key), std::move(profile));
}

std::vector<std::string> DeviceProfileStore::ids() const {
  std::vector<std::string> out;
  out.reserve(profiles_.size());
  for (const auto& [id, _] : profiles_) out.push_back(id);
  return out;
}

const DeviceProfile& register_device(DeviceProfileStore& store, const std::string& device_id,
                                     std::span<const mathcore::ImagePlane> images,
                                     std::span<const mathcore::ImagePlane> scene_hints) {
  if (images.empty()) fail(ErrorCode::kEmptyInput, "registration needs at least one image");
  if (store.contains(device_id)) fail(ErrorCode::kDuplicateDevice, "device '" + device_id + "' already registered");
  DeviceProfile profile;
  profile.device_id = device_id;
  profile.fingerprint = prnu::estimate_fingerprint(images, scene_hints, prnu::FingerprintSource::kRegistration);
  store.insert(std::move(profile));
  return store.at(device_id);
}

}  // namespace abcauth::protocol
