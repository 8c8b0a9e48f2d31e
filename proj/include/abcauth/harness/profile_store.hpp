#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "abcauth/harness/config.hpp"
#include "abcauth/protocol/profile.hpp"
#include "json.hpp"

namespace abcauth::harness {

// JSON with base64 payloads of little-endian doubles. Loading an unknown
// format tag throws FormatVersionMismatch; unreadable files throw IoFailure.
nlohmann::ordered_json profiles_to_json(const protocol::DeviceProfileStore& store);
protocol::DeviceProfileStore profiles_from_json(const nlohmann::ordered_json& j);
void save_profiles(const protocol::DeviceProfileStore& store, const std::filesystem::path& path);
protocol::DeviceProfileStore load_profiles(const std::filesystem::path& path);

struct DeviceRecord {
  std::string device_id;
  std::uint64_t camera_seed = 0;
  std::uint64_t motion_seed = 0;

  friend bool operator==(const DeviceRecord&, const DeviceRecord&) = default;
};

// The simulated population: the resolved configuration it came from and the
// per-device seeds that reproduce it.
struct DeviceManifest {
  nlohmann::ordered_json config;
  std::vector<DeviceRecord> devices;
};

DeviceManifest make_manifest(const ExperimentConfig& config);
void save_manifest(const DeviceManifest& manifest, const std::filesystem::path& path);
DeviceManifest load_manifest(const std::filesystem::path& path);

}  // namespace abcauth::harness
