#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "abcauth/attack/attack.hpp"
#include "abcauth/harness/config.hpp"
#include "abcauth/harness/motion_pipeline.hpp"
#include "abcauth/harness/population.hpp"
#include "abcauth/harness/report.hpp"
#include "abcauth/protocol/profile.hpp"
#include "abcauth/protocol/verifier.hpp"

namespace abcauth::harness {

// Registration photos of server-presented code planes and the planes
// themselves (the server's scene hints).
struct RegistrationCaptures {
  std::vector<mathcore::ImagePlane> images;
  std::vector<mathcore::ImagePlane> hints;
};

RegistrationCaptures registration_captures(const ExperimentConfig& config, const camsim::CameraDevice& camera);

// Enrols every camera of the population.
protocol::DeviceProfileStore enroll_population(const ExperimentConfig& config, const Population& population);

struct SessionEntry {
  int victim = 0;    // enrolled identity claimed
  int claimant = 0;  // device that actually produced the response
  int index = 0;     // per (victim, claimant) counter; selects the motion window
  protocol::SessionMeasurements measurements;
};

struct SessionSet {
  std::vector<SessionEntry> genuine;
  std::vector<SessionEntry> attacks;
};

// Runs every genuine and attack session of the configuration through a
// verifier and records the threshold-independent measurements.
SessionSet simulate_sessions(const ExperimentConfig& config, const Population& population,
                             const protocol::DeviceProfileStore& store);
std::vector<SessionEntry> simulate_genuine(const ExperimentConfig& config, const Population& population,
                                           const protocol::DeviceProfileStore& store);
std::vector<SessionEntry> simulate_attacks(const ExperimentConfig& config, const Population& population,
                                           const protocol::DeviceProfileStore& store, attack::AttackScheme scheme);

// Sweep table for the configured scheme. `motion` must be set under the
// multimodal scheme.
EvalReport tally(const ExperimentConfig& config, const SessionSet& sessions, const MotionDecisions* motion);

struct ExperimentRun {
  EvalReport report;       // configured scheme and attack
  EvalReport baseline;     // prnu-only tallies of the same sessions
  EvalReport calibration;  // prnu-only against the in-session attack
  SessionSet sessions;
};

// Simulates, tallies, calibrates on the prnu-only in-session tallies (unless
// an operating threshold is configured) and fills in the operating point.
// In-session attacks are simulated for calibration even when the configured
// attack is another one. Under the
// multimodal scheme `models` is used when given, otherwise trained here.
ExperimentRun run_experiment_detailed(const ExperimentConfig& config, MotionModels* models = nullptr);
EvalReport run_experiment(const ExperimentConfig& config, MotionModels* models = nullptr);

// Camera checks through the verifier, then the motion check against the
// profile's motion fingerprint. A profile without one leaves the motion check
// skipped.
protocol::VerificationVerdict multimodal_verify(protocol::Verifier& verifier, const std::string& session_id,
                                                const std::array<mathcore::ImagePlane, 2>& response,
                                                const protocol::DeviceProfile& profile,
                                                const protocol::VerifierConfig& config,
                                                const motion::MotionSample* window, MotionModels* models);

}  // namespace abcauth::harness
