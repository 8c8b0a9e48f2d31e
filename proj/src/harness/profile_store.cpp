#include "abcauth/harness/profile_store.hpp"

#include <fstream>

#include "abcauth/common/base64.hpp"
#include "abcauth/common/error.hpp"
#include "abcauth/harness/population.hpp"

namespace abcauth::harness {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kProfilesFormat = "abcauth-profiles/1";
constexpr const char* kDevicesFormat = "abcauth-devices/1";

std::string pack(const double* data, std::size_t n) { return encode_doubles(std::span<const double>(data, n)); }

ordered_json fingerprint_json(const prnu::CameraFingerprintEstimate& fp) {
  return {{"rows", fp.plane.rows()},
          {"cols", fp.plane.cols()},
          {"image_count", fp.image_count},
          {"source", prnu::to_string(fp.source)},
          {"plane", pack(fp.plane.values().data(), fp.plane.size())}};
}

prnu::CameraFingerprintEstimate fingerprint_from(const json& j) {
  prnu::CameraFingerprintEstimate fp;
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  std::vector<double> data = decode_doubles(j.at("plane").get<std::string>());
  if (data.size() != static_cast<std::size_t>(rows) * cols) {
    fail(ErrorCode::kFormatVersionMismatch, "fingerprint payload does not match its shape");
  }
  fp.plane = mathcore::ImagePlane(rows, cols, std::move(data));
  fp.image_count = j.at("image_count").get<int>();
  fp.source = prnu::fingerprint_source_from_string(j.at("source").get<std::string>());
  return fp;
}

ordered_json motion_json(const svm::MotionFingerprint& m) {
  // Eigen storage is column-major; support vectors are transposed so rows stay contiguous.
  const Eigen::MatrixXd sv_t = m.support_vectors.transpose();
  return {{"kernel", svm::to_string(m.kernel)},
          {"dimension", m.dimension},
          {"weights", pack(m.weights.data(), m.weights.size())},
          {"support_vector_count", m.support_vectors.rows()},
          {"support_vectors", pack(sv_t.data(), sv_t.size())},
          {"coefficients", pack(m.coefficients.data(), m.coefficients.size())},
          {"bias", m.bias},
          {"c", m.c},
          {"gamma", m.gamma},
          {"objective_history", pack(m.objective_history.data(), m.objective_history.size())},
          {"iterations", m.iterations}};
}

Eigen::VectorXd vector_from(const json& j) {
  const std::vector<double> v = decode_doubles(j.get<std::string>());
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

svm::MotionFingerprint motion_from(const json& j) {
  svm::MotionFingerprint m;
  m.kernel = svm::kernel_from_string(j.at("kernel").get<std::string>());
  m.dimension = j.at("dimension").get<int>();
  m.weights = vector_from(j.at("weights"));
  const Eigen::Index count = j.at("support_vector_count").get<Eigen::Index>();
  const std::vector<double> sv = decode_doubles(j.at("support_vectors").get<std::string>());
  if (static_cast<Eigen::Index>(sv.size()) != count * (count == 0 ? 0 : m.dimension)) {
    fail(ErrorCode::kFormatVersionMismatch, "support vector payload does not match its shape");
  }
  m.support_vectors = Eigen::Map<const Eigen::MatrixXd>(sv.data(), count == 0 ? 0 : m.dimension, count).transpose();
  m.coefficients = vector_from(j.at("coefficients"));
  m.bias = j.at("bias").get<double>();
  m.c = j.at("c").get<double>();
  m.gamma = j.at("gamma").get<double>();
  m.objective_history = decode_doubles(j.at("objective_history").get<std::string>());
  m.iterations = j.at("iterations").get<std::int64_t>();
  return m;
}

ordered_json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoFailure, "cannot open " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kIoFailure, path.string() + " is not valid JSON: " + e.what());
  }
}

void write_json(const ordered_json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::kIoFailure, "write failed for " + path.string());
}

void check_format(const json& j, const char* expected) {
  const std::string got = j.contains("format") && j["format"].is_string() ? j["format"].get<std::string>() : "";
  if (got != expected) {
    fail(ErrorCode::kFormatVersionMismatch,
         "expected format '" + std::string(expected) + "', found '" + got + "'");
  }
}

}  // namespace

ordered_json profiles_to_json(const protocol::DeviceProfileStore& store) {
  ordered_json list = ordered_json::array();
  for (const auto& [id, p] : store.profiles()) {
    list.push_back({{"device_id", id},
                    {"fingerprint", fingerprint_json(p.fingerprint)},
                    {"motion", p.motion ? motion_json(*p.motion) : ordered_json()}});
  }
  return {{"format", kProfilesFormat}, {"profiles", list}};
}

protocol::DeviceProfileStore profiles_from_json(const ordered_json& j) {
  check_format(j, kProfilesFormat);
  protocol::DeviceProfileStore store;
  try {
    for (const json& p : j.at("profiles")) {
      protocol::DeviceProfile profile;
      profile.device_id = p.at("device_id").get<std::string>();
      profile.fingerprint = fingerprint_from(p.at("fingerprint"));
      if (!p.at("motion").is_null()) profile.motion = motion_from(p.at("motion"));
      store.insert(std::move(profile));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormatVersionMismatch, std::string("malformed profile file: ") + e.what());
  }
  return store;
}

void save_profiles(const protocol::DeviceProfileStore& store, const std::filesystem::path& path) {
  write_json(profiles_to_json(store), path);
}

protocol::DeviceProfileStore load_profiles(const std::filesystem::path& path) {
  return profiles_from_json(read_json(path));
}

DeviceManifest make_manifest(const ExperimentConfig& config) {
  DeviceManifest m;
  m.config = to_json(config);
  for (int k = 0; k < config.devices; ++k) {
    const std::string id = device_id(k);
    m.devices.push_back({id, derived_seed(config.seed, "camera/" + id), derived_seed(config.seed, "motion/" + id)});
  }
  return m;
}

void save_manifest(const DeviceManifest& manifest, const std::filesystem::path& path) {
  ordered_json list = ordered_json::array();
  for (const DeviceRecord& d : manifest.devices) {
    list.push_back({{"device_id", d.device_id}, {"camera_seed", d.camera_seed}, {"motion_seed", d.motion_seed}});
  }
  write_json({{"format", kDevicesFormat}, {"config", manifest.config}, {"devices", list}}, path);
}

DeviceManifest load_manifest(const std::filesystem::path& path) {
  const ordered_json j = read_json(path);
  check_format(j, kDevicesFormat);
  DeviceManifest m;
  try {
    m.config = j.at("config");
    for (const json& d : j.at("devices")) {
      m.devices.push_back({d.at("device_id").get<std::string>(), d.at("camera_seed").get<std::uint64_t>(),
                           d.at("motion_seed").get<std::uint64_t>()});
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormatVersionMismatch, std::string("malformed device file: ") + e.what());
  }
  return m;
}

}  // namespace abcauth::harness
