#include "abcauth/harness/experiment.hpp"

#include "abcauth/attack/attack.hpp"
#include "abcauth/camsim/block_code.hpp"
#include "abcauth/common/error.hpp"

namespace abcauth::harness {

namespace {

protocol::Verifier session_verifier(const ExperimentConfig& config) {
  return protocol::Verifier(config.challenge_spec(), [] { return std::int64_t{0}; });
}

double rate(std::size_t count, std::size_t total) {
  return total == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(total);
}

}  // namespace

RegistrationCaptures registration_captures(const ExperimentConfig& config, const camsim::CameraDevice& camera) {
  mathcore::RandomStream rng = stream_for(config.seed, "register/" + camera.id());
  RegistrationCaptures out;
  for (int k = 0; k < config.registration_images; ++k) {
    const camsim::QrPayload payload{"register:" + camera.id() + ":" + std::to_string(k + 1),
                                    static_cast<std::int64_t>(rng.next_u64() >> 24)};
    out.hints.push_back(camsim::encode_code(payload, config.rows, config.cols));
    out.images.push_back(camera.capture(out.hints.back(), rng));
  }
  return out;
}

protocol::DeviceProfileStore enroll_population(const ExperimentConfig& config, const Population& population) {
  protocol::DeviceProfileStore store;
  for (const auto& camera : population.cameras) {
    const RegistrationCaptures caps = registration_captures(config, camera);
    protocol::register_device(store, camera.id(), caps.images, caps.hints);
  }
  return store;
}

std::vector<SessionEntry> simulate_genuine(const ExperimentConfig& config, const Population& population,
                                           const protocol::DeviceProfileStore& store) {
  const protocol::VerifierConfig vc = config.verifier_config(config.verifier.fingerprint_threshold);
  protocol::Verifier verifier = session_verifier(config);
  std::vector<SessionEntry> out;
  for (int v = 0; v < static_cast<int>(population.cameras.size()); ++v) {
    const auto& camera = population.cameras[v];
    const auto& profile = store.at(camera.id());
    for (int s = 0; s < config.genuine_sessions; ++s) {
      const std::string label = "session/genuine/" + std::to_string(v) + "/" + std::to_string(s);
      mathcore::RandomStream rng = stream_for(config.seed, label);
      const protocol::Challenge ch = verifier.issue_challenge(rng);
      const std::array<mathcore::ImagePlane, 2> response{camera.capture(ch.planes[0], rng),
                                                         camera.capture(ch.planes[1], rng)};
      auto [verdict, m] = verifier.verify_detailed(ch.session_id, response, profile, vc);
      out.push_back({v, v, s, std::move(m)});
    }
  }
  return out;
}

std::vector<SessionEntry> simulate_attacks(const ExperimentConfig& config, const Population& population,
                                           const protocol::DeviceProfileStore& store, attack::AttackScheme scheme) {
  std::vector<SessionEntry> out;
  if (config.attacks_per_pair == 0) return out;
  const protocol::VerifierConfig vc = config.verifier_config(config.verifier.fingerprint_threshold);
  protocol::Verifier verifier = session_verifier(config);
  const int n = static_cast<int>(population.cameras.size());
  std::vector<prnu::CameraFingerprintEstimate> harvested, side;
  for (const auto& camera : population.cameras) {
    mathcore::RandomStream h = stream_for(config.seed, "harvest/" + camera.id());
    harvested.push_back(attack::harvest_victim_fingerprint(camera, config.effective_harvest_images(), h));
    mathcore::RandomStream a = stream_for(config.seed, "side/" + camera.id());
    side.push_back(attack::estimate_attacker_fingerprint(camera, config.effective_side_photos(), a));
  }
  for (int v = 0; v < n; ++v) {
    const auto& profile = store.at(population.cameras[v].id());
    for (int a = 0; a < n; ++a) {
      if (a == v) continue;
      const attack::AttackPlan plan{population.cameras[a], harvested[v], side[a], scheme};
      for (int s = 0; s < config.attacks_per_pair; ++s) {
        const std::string label =
            "session/attack/" + std::to_string(v) + "/" + std::to_string(a) + "/" + std::to_string(s);
        mathcore::RandomStream rng = stream_for(config.seed, label);
        const protocol::Challenge ch = verifier.issue_challenge(rng);
        const auto response = attack::forge_response(plan, ch.planes, rng);
        auto [verdict, m] = verifier.verify_detailed(ch.session_id, response, profile, vc);
        out.push_back({v, a, s, std::move(m)});
      }
    }
  }
  return out;
}

SessionSet simulate_sessions(const ExperimentConfig& config, const Population& population,
                             const protocol::DeviceProfileStore& store) {
  return {simulate_genuine(config, population, store), simulate_attacks(config, population, store, config.attack)};
}

EvalReport tally(const ExperimentConfig& config, const SessionSet& sessions, const MotionDecisions* motion) {
  const bool multimodal = config.scheme == DefenseScheme::kMultimodal;
  if (multimodal && motion == nullptr) {
    fail(ErrorCode::kConfigInvalid, "multimodal tally needs motion decisions");
  }
  auto motion_ok = [&](const SessionEntry& e) {
    return !multimodal || motion->accept.at(e.victim).at(e.claimant).at(e.index) != 0;
  };

  EvalReport r;
  r.scheme = std::string(to_string(config.scheme));
  r.attack = std::string(attack::to_string(config.attack));
  r.registration_images = config.registration_images;
  r.genuine_sessions = sessions.genuine.size();
  r.attack_sessions = sessions.attacks.size();
  r.seed = config.seed;
  r.config_hash = config_hash(config);
  r.config = to_json(config);

  for (double tau : config.sweep.thresholds()) {
    const protocol::VerifierConfig vc = config.verifier_config(tau);
    ThresholdRow row;
    row.threshold = tau;
    for (const SessionEntry& e : sessions.attacks) {
      const protocol::CheckResults c = protocol::evaluate_checks(e.measurements, vc);
      const bool mo = motion_ok(e);
      const bool fd = c.qr_integrity && c.fingerprint_match && c.forgery_detection && mo;
      const bool rd = c.qr_integrity && c.removal_detection && mo;
      row.fd_accepted += fd;
      row.rd_accepted += rd;
      row.fdrd_accepted += fd && rd;
    }
    for (const SessionEntry& e : sessions.genuine) {
      const protocol::CheckResults c = protocol::evaluate_checks(e.measurements, vc);
      const bool ok = c.qr_integrity && c.fingerprint_match && c.forgery_detection && c.removal_detection &&
                      motion_ok(e);
      row.genuine_rejected += !ok;
    }
    row.fd_far = rate(row.fd_accepted, r.attack_sessions);
    row.rd_far = rate(row.rd_accepted, r.attack_sessions);
    row.fdrd_far = rate(row.fdrd_accepted, r.attack_sessions);
    row.frr = rate(row.genuine_rejected, r.genuine_sessions);
    r.rows.push_back(row);
  }
  return r;
}

ExperimentRun run_experiment_detailed(const ExperimentConfig& config, MotionModels* models) {
  config.validate();
  const Population population = make_population(config);
  const protocol::DeviceProfileStore store = enroll_population(config, population);

  ExperimentRun run;
  run.sessions = simulate_sessions(config, population, store);

  ExperimentConfig baseline_config = config;
  baseline_config.scheme = DefenseScheme::kPrnuOnly;
  run.baseline = tally(baseline_config, run.sessions, nullptr);

  if (config.attack == attack::AttackScheme::kInSession) {
    run.calibration = run.baseline;
  } else {
    ExperimentConfig cal_config = baseline_config;
    cal_config.attack = attack::AttackScheme::kInSession;
    const SessionSet cal{run.sessions.genuine,
                         simulate_attacks(cal_config, population, store, attack::AttackScheme::kInSession)};
    run.calibration = tally(cal_config, cal, nullptr);
  }

  if (config.scheme == DefenseScheme::kMultimodal) {
    std::optional<MotionModels> own;
    if (models == nullptr) {
      own.emplace(train_motion_models(config, population));
      models = &*own;
    }
    const MotionDecisions decisions = motion_decisions(config, population, *models);
    run.report = tally(config, run.sessions, &decisions);
    run.report.motion = models->summary;
  } else {
    run.report = run.baseline;
  }

  const double tau = config.operating_threshold ? *config.operating_threshold
                                                : calibrate_threshold(run.calibration, config.target_far);
  for (EvalReport* r : {&run.report, &run.baseline, &run.calibration}) {
    if (!config.operating_threshold) r->calibrated_threshold = tau;
    r->operating = operating_point(*r, tau);
  }
  return run;
}

EvalReport run_experiment(const ExperimentConfig& config, MotionModels* models) {
  return run_experiment_detailed(config, models).report;
}

protocol::VerificationVerdict multimodal_verify(protocol::Verifier& verifier, const std::string& session_id,
                                                const std::array<mathcore::ImagePlane, 2>& response,
                                                const protocol::DeviceProfile& profile,
                                                const protocol::VerifierConfig& config,
                                                const motion::MotionSample* window, MotionModels* models) {
  protocol::VerificationVerdict verdict = verifier.verify(session_id, response, profile, config);
  if (profile.motion && window != nullptr && models != nullptr) {
    const Eigen::MatrixXd emb = neural::extract_embeddings(models->cnn, models->convlstm, {*window});
    const double score = svm::svm_score(*profile.motion, emb.row(0).transpose());
    verdict.pce["motion_score"] = score;
    verdict.checks[protocol::Check::kMotionMatch] =
        score > 0 ? protocol::CheckOutcome::kPass : protocol::CheckOutcome::kFail;
    verdict.settle();
  }
  return verdict;
}

}  // namespace abcauth::harness
