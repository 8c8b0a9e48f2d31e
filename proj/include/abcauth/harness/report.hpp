#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "abcauth/harness/motion_pipeline.hpp"
#include "json.hpp"

namespace abcauth::harness {

// FD: code + fingerprint + forgery checks. RD: code + probe check.
// FD+RD: every check (and the motion check under the multimodal scheme).
struct ThresholdRow {
  double threshold = 0.0;
  std::size_t fd_accepted = 0;
  std::size_t rd_accepted = 0;
  std::size_t fdrd_accepted = 0;
  std::size_t genuine_rejected = 0;
  double fd_far = 0.0;
  double rd_far = 0.0;
  double fdrd_far = 0.0;
  double frr = 0.0;

  friend bool operator==(const ThresholdRow&, const ThresholdRow&) = default;
};

struct OperatingPoint {
  double threshold = 0.0;
  std::size_t false_accepts = 0;
  std::size_t false_rejects = 0;
  double far = 0.0;
  double frr = 0.0;
  double accuracy = 0.0;  // correct decisions over all sessions

  friend bool operator==(const OperatingPoint&, const OperatingPoint&) = default;
};

struct EvalReport {
  std::string scheme;
  std::string attack;
  int registration_images = 0;
  std::size_t genuine_sessions = 0;
  std::size_t attack_sessions = 0;
  std::vector<ThresholdRow> rows;
  std::optional<double> calibrated_threshold;
  std::optional<OperatingPoint> operating;
  std::uint64_t seed = 0;
  std::string config_hash;
  nlohmann::ordered_json config;
  std::optional<MotionSummary> motion;
  std::optional<double> wall_time_s;

  const ThresholdRow& row_at(double threshold) const;  // throws ConfigInvalid
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Smallest sweep threshold whose FD+RD FAR is at most `target_far`. Throws
// NoThresholdSatisfies.
double calibrate_threshold(const EvalReport& baseline, double target_far);
OperatingPoint operating_point(const EvalReport& report, double threshold);

// threshold,fd_far,rd_far,fdrd_far,frr
std::string report_csv(const EvalReport& report);
nlohmann::ordered_json report_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::ordered_json& j);  // throws FormatVersionMismatch

// Writes <stem>.csv and <stem>.json.
void save_report(const EvalReport& report, const std::filesystem::path& stem);
EvalReport load_report(const std::filesystem::path& json_path);

}  // namespace abcauth::harness
