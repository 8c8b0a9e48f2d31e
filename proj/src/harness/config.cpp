#include "abcauth/harness/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>

#include "abcauth/common/error.hpp"
#include "abcauth/mathcore/random_stream.hpp"

namespace abcauth::harness {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(DefenseScheme scheme) {
  return scheme == DefenseScheme::kPrnuOnly ? "prnu_only" : "multimodal";
}

DefenseScheme defense_scheme_from_string(std::string_view text) {
  if (text == "prnu_only") return DefenseScheme::kPrnuOnly;
  if (text == "multimodal") return DefenseScheme::kMultimodal;
  fail(ErrorCode::kConfigInvalid, "unknown scheme '" + std::string(text) + "'");
}

std::vector<double> SweepRange::thresholds() const {
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((max - min) / step + 1e-9));
  out.reserve(static_cast<std::size_t>(n + 1));
  for (long k = 0; k <= n; ++k) out.push_back(min + static_cast<double>(k) * step);
  return out;
}

double ExperimentConfig::effective_forgery_margin() const {
  return auto_forgery_margin ? 0.5 * static_cast<double>(rows) * cols : verifier.forgery_margin;
}

protocol::VerifierConfig ExperimentConfig::verifier_config(double threshold) const {
  protocol::VerifierConfig v = verifier;
  v.fingerprint_threshold = threshold;
  v.probe_threshold = threshold;
  v.forgery_margin = effective_forgery_margin();
  return v;
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::kConfigInvalid, what);
  };
  require(devices >= 2, "devices must be at least 2");
  require(registration_images >= 1, "registration_images must be positive");
  require(harvest_images >= 0, "harvest_images must be non-negative");
  require(attacker_side_photos >= 0, "attacker_side_photos must be non-negative");
  require(genuine_sessions >= 1, "genuine_sessions must be positive");
  require(attacks_per_pair >= 1, "attacks_per_pair must be positive");
  require(rows >= 16 && cols >= 16, "planes must be at least 16x16");
  require(sigma_fingerprint >= 0 && sigma_probe > 0 && sigma_shot >= 0, "noise levels must be non-negative");
  require(sweep.step > 0 && sweep.min < sweep.max && sweep.min >= 0, "sweep needs 0 <= min < max and step > 0");
  require(verifier.fingerprint_threshold >= 0 && verifier.probe_threshold >= 0 && verifier.forgery_margin >= 0,
          "verifier thresholds must be non-negative");
  require(verifier.challenge_timeout_ms > 0, "timeout must be positive");
  require(verifier.exclusion_radius >= 0, "exclusion radius must be non-negative");
  require(target_far >= 0 && target_far <= 1, "target_far must lie in [0, 1]");
  const MotionConfig& m = motion;
  require(m.extra_pretrain_devices >= 0 && m.pool_devices >= 1 && m.pool_windows >= 1,
          "motion pool must be non-empty");
  require(m.pretrain_windows >= 2 && m.registration_windows >= 1, "motion window counts must be positive");
  require(m.train_fraction > 0 && m.train_fraction < 1, "train_fraction must lie in (0, 1)");
  require(m.convlstm_steps >= 1 && 150 % m.convlstm_steps == 0, "convlstm_steps must divide 150");
  require(m.train.learning_rate >= 0 && m.train.batch_size > 0 && m.train.max_epochs > 0 && m.train.patience > 0,
          "training settings must be positive");
  require(m.svm.c > 0, "svm c must be positive");
}

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) fail(ErrorCode::kConfigInvalid, where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(ErrorCode::kConfigInvalid, "unknown config key '" + where + key + "'");
  }
}

template <class V>
void read(const json& obj, const char* key, V& out) {
  if (obj.contains(key)) out = obj.at(key).get<V>();
}

ordered_json sweep_json(const SweepRange& s) { return {{"min", s.min}, {"max", s.max}, {"step", s.step}}; }

}  // namespace

ordered_json to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["devices"] = c.devices;
  j["registration_images"] = c.registration_images;
  j["harvest_images"] = c.harvest_images;
  j["attacker_side_photos"] = c.attacker_side_photos;
  j["genuine_sessions"] = c.genuine_sessions;
  j["attacks_per_pair"] = c.attacks_per_pair;
  j["plane"] = {{"rows", c.rows}, {"cols", c.cols}};
  j["noise"] = {{"fingerprint", c.sigma_fingerprint}, {"probe", c.sigma_probe}, {"shot", c.sigma_shot}};
  j["sweep"] = sweep_json(c.sweep);
  j["scheme"] = to_string(c.scheme);
  j["attack"] = attack::to_string(c.attack);
  ordered_json v;
  v["fingerprint_threshold"] = c.verifier.fingerprint_threshold;
  v["probe_threshold"] = c.verifier.probe_threshold;
  if (c.auto_forgery_margin) {
    v["forgery_margin"] = "auto";
  } else {
    v["forgery_margin"] = c.verifier.forgery_margin;
  }
  v["subtract_probe"] = c.verifier.subtract_probe_for_fingerprint;
  v["exclusion_radius"] = c.verifier.exclusion_radius;
  v["timeout_ms"] = c.verifier.challenge_timeout_ms;
  j["verifier"] = v;
  ordered_json cal;
  cal["target_far"] = c.target_far;
  cal["operating_threshold"] = c.operating_threshold ? ordered_json(*c.operating_threshold) : ordered_json(nullptr);
  j["calibration"] = cal;

  const MotionConfig& m = c.motion;
  ordered_json mj;
  mj["extra_pretrain_devices"] = m.extra_pretrain_devices;
  mj["pool_devices"] = m.pool_devices;
  mj["pool_windows"] = m.pool_windows;
  mj["pretrain_windows"] = m.pretrain_windows;
  mj["train_fraction"] = m.train_fraction;
  mj["registration_windows"] = m.registration_windows;
  mj["train"] = {{"learning_rate", m.train.learning_rate}, {"batch_size", m.train.batch_size},
                 {"max_epochs", m.train.max_epochs},       {"patience", m.train.patience},
                 {"seed", m.train.seed},                   {"restore_best", m.train.restore_best},
                 {"stop_at_perfect_validation", m.train.stop_at_perfect_validation}};
  mj["convlstm_layout"] = neural::to_string(m.convlstm_layout);
  mj["convlstm_steps"] = m.convlstm_steps;
  mj["svm"] = {{"kernel", svm::to_string(m.svm.kernel)},
               {"c", m.svm.c},
               {"c_convention", m.svm.c_is_conventional ? "conventional" : "objective"},
               {"gamma", m.svm.gamma},
               {"balance_classes", m.svm.balance_classes},
               {"gap_tolerance", m.svm.gap_tolerance}};
  mj["preprocess"] = {{"per_channel_rescale", m.preprocess.per_channel_rescale},
                      {"interpolate_by_time", m.preprocess.interpolate_by_time}};
  mj["generator"] = {{"value_std", m.generator.value_std},
                     {"phase_std", m.generator.phase_std},
                     {"amplitude_rel", m.generator.amplitude_rel},
                     {"timestamp_std_ms", m.generator.timestamp_std_ms}};
  j["motion"] = mj;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    check_keys(j,
               {"seed", "devices", "registration_images", "harvest_images", "attacker_side_photos",
                "genuine_sessions", "attacks_per_pair", "plane", "noise", "sweep", "scheme", "attack", "verifier",
                "calibration", "motion"},
               "");
    read(j, "seed", c.seed);
    read(j, "devices", c.devices);
    read(j, "registration_images", c.registration_images);
    read(j, "harvest_images", c.harvest_images);
    read(j, "attacker_side_photos", c.attacker_side_photos);
    read(j, "genuine_sessions", c.genuine_sessions);
    read(j, "attacks_per_pair", c.attacks_per_pair);
    if (j.contains("plane")) {
      const json& p = j.at("plane");
      check_keys(p, {"rows", "cols"}, "plane.");
      read(p, "rows", c.rows);
      read(p, "cols", c.cols);
    }
    if (j.contains("noise")) {
      const json& n = j.at("noise");
      check_keys(n, {"fingerprint", "probe", "shot"}, "noise.");
      read(n, "fingerprint", c.sigma_fingerprint);
      read(n, "probe", c.sigma_probe);
      read(n, "shot", c.sigma_shot);
    }
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      check_keys(s, {"min", "max", "step"}, "sweep.");
      read(s, "min", c.sweep.min);
      read(s, "max", c.sweep.max);
      read(s, "step", c.sweep.step);
    }
    if (j.contains("scheme")) c.scheme = defense_scheme_from_string(j.at("scheme").get<std::string>());
    if (j.contains("attack")) c.attack = attack::attack_scheme_from_string(j.at("attack").get<std::string>());
    if (j.contains("verifier")) {
      const json& v = j.at("verifier");
      check_keys(v,
                 {"fingerprint_threshold", "probe_threshold", "forgery_margin", "subtract_probe", "exclusion_radius",
                  "timeout_ms"},
                 "verifier.");
      read(v, "fingerprint_threshold", c.verifier.fingerprint_threshold);
      read(v, "probe_threshold", c.verifier.probe_threshold);
      if (v.contains("forgery_margin")) {
        const json& fm = v.at("forgery_margin");
        if (fm.is_string()) {
          if (fm.get<std::string>() != "auto") fail(ErrorCode::kConfigInvalid, "forgery_margin must be a number or \"auto\"");
          c.auto_forgery_margin = true;
        } else {
          c.auto_forgery_margin = false;
          c.verifier.forgery_margin = fm.get<double>();
        }
      }
      read(v, "subtract_probe", c.verifier.subtract_probe_for_fingerprint);
      read(v, "exclusion_radius", c.verifier.exclusion_radius);
      read(v, "timeout_ms", c.verifier.challenge_timeout_ms);
    }
    if (j.contains("calibration")) {
      const json& cal = j.at("calibration");
      check_keys(cal, {"target_far", "operating_threshold"}, "calibration.");
      read(cal, "target_far", c.target_far);
      if (cal.contains("operating_threshold") && !cal.at("operating_threshold").is_null()) {
        c.operating_threshold = cal.at("operating_threshold").get<double>();
      }
    }
    if (j.contains("motion")) {
      const json& mj = j.at("motion");
      MotionConfig& m = c.motion;
      check_keys(mj,
                 {"extra_pretrain_devices", "pool_devices", "pool_windows", "pretrain_windows", "train_fraction",
                  "registration_windows", "train", "convlstm_layout", "convlstm_steps", "svm", "preprocess",
                  "generator"},
                 "motion.");
      read(mj, "extra_pretrain_devices", m.extra_pretrain_devices);
      read(mj, "pool_devices", m.pool_devices);
      read(mj, "pool_windows", m.pool_windows);
      read(mj, "pretrain_windows", m.pretrain_windows);
      read(mj, "train_fraction", m.train_fraction);
      read(mj, "registration_windows", m.registration_windows);
      if (mj.contains("train")) {
        const json& t = mj.at("train");
        check_keys(t,
                   {"learning_rate", "batch_size", "max_epochs", "patience", "seed", "restore_best",
                    "stop_at_perfect_validation"},
                   "motion.train.");
        read(t, "learning_rate", m.train.learning_rate);
        read(t, "batch_size", m.train.batch_size);
        read(t, "max_epochs", m.train.max_epochs);
        read(t, "patience", m.train.patience);
        read(t, "seed", m.train.seed);
        read(t, "restore_best", m.train.restore_best);
        read(t, "stop_at_perfect_validation", m.train.stop_at_perfect_validation);
      }
      if (mj.contains("convlstm_layout")) {
        const auto layout = mj.at("convlstm_layout").get<std::string>();
        if (layout == "sensor_channels") {
          m.convlstm_layout = neural::SequenceLayout::kSensorChannels;
        } else if (layout == "spatial_maps") {
          m.convlstm_layout = neural::SequenceLayout::kSpatialMaps;
        } else {
          fail(ErrorCode::kConfigInvalid, "unknown convlstm_layout '" + layout + "'");
        }
      }
      read(mj, "convlstm_steps", m.convlstm_steps);
      if (mj.contains("svm")) {
        const json& s = mj.at("svm");
        check_keys(s, {"kernel", "c", "c_convention", "gamma", "balance_classes", "gap_tolerance"}, "motion.svm.");
        if (s.contains("kernel")) m.svm.kernel = svm::kernel_from_string(s.at("kernel").get<std::string>());
        read(s, "c", m.svm.c);
        if (s.contains("c_convention")) {
          const auto conv = s.at("c_convention").get<std::string>();
          if (conv != "conventional" && conv != "objective") {
            fail(ErrorCode::kConfigInvalid, "c_convention must be \"conventional\" or \"objective\"");
          }
          m.svm.c_is_conventional = conv == "conventional";
        }
        read(s, "gamma", m.svm.gamma);
        read(s, "balance_classes", m.svm.balance_classes);
        read(s, "gap_tolerance", m.svm.gap_tolerance);
      }
      if (mj.contains("preprocess")) {
        const json& p = mj.at("preprocess");
        check_keys(p, {"per_channel_rescale", "interpolate_by_time"}, "motion.preprocess.");
        read(p, "per_channel_rescale", m.preprocess.per_channel_rescale);
        read(p, "interpolate_by_time", m.preprocess.interpolate_by_time);
      }
      if (mj.contains("generator")) {
        const json& g = mj.at("generator");
        check_keys(g, {"value_std", "phase_std", "amplitude_rel", "timestamp_std_ms"}, "motion.generator.");
        read(g, "value_std", m.generator.value_std);
        read(g, "phase_std", m.generator.phase_std);
        read(g, "amplitude_rel", m.generator.amplitude_rel);
        read(g, "timestamp_std_ms", m.generator.timestamp_std_ms);
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfigInvalid, std::string("bad config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoFailure, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfigInvalid, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(mathcore::fnv1a64(to_json(config).dump())));
  return buf;
}

std::optional<std::filesystem::path> default_config_path() {
  const char* env = std::getenv("ABCAUTH_CONFIG");
  if (env == nullptr || *env == '\0') return std::nullopt;
  return std::filesystem::path(env);
}

}  // namespace abcauth::harness
