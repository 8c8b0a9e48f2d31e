#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abcauth/mathcore/image_plane.hpp"
#include "abcauth/prnu/residue.hpp"
#include "abcauth/svm/svm.hpp"

namespace abcauth::protocol {

struct DeviceProfile {
  std::string device_id;
  prnu::CameraFingerprintEstimate fingerprint;
  std::optional<svm::MotionFingerprint> motion;
};

// Server-side registry of enrolled devices, keyed by device id.
class DeviceProfileStore {
 public:
  bool contains(const std::string& device_id) const { return profiles_.contains(device_id); }
  const DeviceProfile& at(const std::string& device_id) const;
  DeviceProfile& at(const std::string& device_id);
  void insert(DeviceProfile profile);  // throws DuplicateDevice
  std::vector<std::string> ids() const;
  std::size_t size() const noexcept { return profiles_.size(); }
  const std::map<std::string, DeviceProfile>& profiles() const noexcept { return profiles_; }

 private:
  std::map<std::string, DeviceProfile> profiles_;
};

// Enrols a device from its registration photos. With scene hints (the server
// knows what it asked the user to photograph) residues use the known-scene
// path; without them the blind path.
const DeviceProfile& register_device(DeviceProfileStore& store, const std::string& device_id,
                                     std::span<const mathcore::ImagePlane> images,
                                     std::span<const mathcore::ImagePlane> scene_hints = {});

}  // namespace abcauth::protocol
