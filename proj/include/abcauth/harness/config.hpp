#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abcauth/attack/attack.hpp"
#include "abcauth/motion/generator.hpp"
#include "abcauth/motion/preprocess.hpp"
#include "abcauth/neural/convlstm.hpp"
#include "abcauth/neural/train.hpp"
#include "abcauth/protocol/verifier.hpp"
#include "abcauth/svm/svm.hpp"
#include "json.hpp"

namespace abcauth::harness {

enum class DefenseScheme { kPrnuOnly, kMultimodal };

std::string_view to_string(DefenseScheme scheme);
DefenseScheme defense_scheme_from_string(std::string_view text);

struct SweepRange {
  double min = 0.0;
  double max = 4000.0;
  double step = 10.0;

  // min, min + step, ... up to max inclusive (index-based, no drift).
  std::vector<double> thresholds() const;
};

struct MotionConfig {
  int extra_pretrain_devices = 4;  // pretraining classes beyond the experiment devices
  int pool_devices = 4;            // negative-pool devices, disjoint from everything else
  int pool_windows = 50;           // per pool device
  int pretrain_windows = 200;      // per pretraining class
  double train_fraction = 0.8;
  int registration_windows = 5;    // positives per motion fingerprint
  neural::TrainConfig train;
  neural::SequenceLayout convlstm_layout = neural::SequenceLayout::kSensorChannels;
  int convlstm_steps = 10;
  svm::SvmConfig svm;
  motion::PreprocessOptions preprocess;
  motion::GeneratorNoise generator;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int devices = 6;
  int registration_images = 5;
  int harvest_images = 0;  // victim photos the attacker collects; 0 means registration_images
  int attacker_side_photos = 0;  // own photos behind the precomputed estimate; 0 means registration_images
  int genuine_sessions = 100;   // per device
  int attacks_per_pair = 100;   // per (victim, attacker)
  int rows = 128;
  int cols = 128;
  double sigma_fingerprint = camsim::kDefaultFingerprintSigma;
  double sigma_probe = camsim::kDefaultProbeSigma;
  double sigma_shot = camsim::kDefaultShotSigma;
  SweepRange sweep;
  DefenseScheme scheme = DefenseScheme::kPrnuOnly;
  attack::AttackScheme attack = attack::AttackScheme::kPrecomputed;
  protocol::VerifierConfig verifier;  // thresholds used by single sessions
  bool auto_forgery_margin = true;    // margin = half the pixel count
  double target_far = 0.005;
  std::optional<double> operating_threshold;  // skips calibration when set
  MotionConfig motion;

  int effective_harvest_images() const { return harvest_images > 0 ? harvest_images : registration_images; }
  int effective_side_photos() const { return attacker_side_photos > 0 ? attacker_side_photos : registration_images; }
  double effective_forgery_margin() const;
  protocol::VerifierConfig verifier_config(double threshold) const;
  protocol::ChallengeSpec challenge_spec() const { return {rows, cols, sigma_probe}; }

  // Throws ConfigInvalid.
  void validate() const;
};

// Full resolved form with every field present.
nlohmann::ordered_json to_json(const ExperimentConfig& config);
// Missing fields keep their defaults; unknown fields throw ConfigInvalid.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_hash(const ExperimentConfig& config);

// Path from the ABCAUTH_CONFIG environment variable, if set.
std::optional<std::filesystem::path> default_config_path();

}  // namespace abcauth::harness
