// abcauth command-line front end.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "abcauth/attack/attack.hpp"
#include "abcauth/common/error.hpp"
#include "abcauth/harness/config.hpp"
#include "abcauth/harness/experiment.hpp"
#include "abcauth/harness/motion_pipeline.hpp"
#include "abcauth/harness/population.hpp"
#include "abcauth/harness/profile_store.hpp"
#include "abcauth/harness/report.hpp"
#include "abcauth/neural/checkpoint.hpp"
#include "abcauth/protocol/session_log.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace abcauth;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string scheme;
  std::string attack;
  std::optional<int> devices;
  std::optional<int> images;
  std::optional<int> genuine;
  std::optional<int> attacks;
  std::optional<double> threshold;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config_path, "experiment config (default: $ABCAUTH_CONFIG, else built-in)");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--scheme", f.scheme, "prnu_only | multimodal");
  cmd->add_option("--attack", f.attack, "precomputed | in_session");
  cmd->add_option("--devices", f.devices, "number of devices");
  cmd->add_option("--images", f.images, "registration images per device");
  cmd->add_option("--genuine", f.genuine, "genuine sessions per device");
  cmd->add_option("--attacks", f.attacks, "attack sessions per (victim, attacker) pair");
  cmd->add_option("--threshold", f.threshold, "operating threshold (skips calibration)");
}

harness::ExperimentConfig resolve_config(const CommonFlags& f) {
  harness::ExperimentConfig c;
  if (!f.config_path.empty()) {
    c = harness::load_config(f.config_path);
  } else if (auto env = harness::default_config_path()) {
    c = harness::load_config(*env);
  }
  if (f.seed) c.seed = *f.seed;
  if (!f.scheme.empty()) c.scheme = harness::defense_scheme_from_string(f.scheme);
  if (!f.attack.empty()) c.attack = attack::attack_scheme_from_string(f.attack);
  if (f.devices) c.devices = *f.devices;
  if (f.images) c.registration_images = *f.images;
  if (f.genuine) c.genuine_sessions = *f.genuine;
  if (f.attacks) c.attacks_per_pair = *f.attacks;
  if (f.threshold) c.operating_threshold = *f.threshold;
  c.validate();
  return c;
}

void print_json(const ordered_json& j) { std::cout << j.dump() << '\n'; }

// Model directory layout: cnn.ckpt, convlstm.ckpt, summary.json.
void save_models(harness::MotionModels& m, const fs::path& dir) {
  fs::create_directories(dir);
  neural::save_checkpoint(m.cnn, dir / "cnn.ckpt");
  neural::save_checkpoint(m.convlstm, dir / "convlstm.ckpt");
  const harness::MotionSummary& s = m.summary;
  std::ofstream out(dir / "summary.json");
  if (!out) fail(ErrorCode::kIoFailure, "cannot write " + (dir / "summary.json").string());
  out << ordered_json{{"classes", s.classes},
                      {"cnn_val_accuracy", s.cnn_val_accuracy},
                      {"convlstm_val_accuracy", s.convlstm_val_accuracy},
                      {"ensemble_val_accuracy", s.ensemble_val_accuracy},
                      {"cnn_epochs", s.cnn_epochs},
                      {"convlstm_epochs", s.convlstm_epochs}}
             .dump(2)
      << '\n';
}

harness::MotionModels load_models(const fs::path& dir) {
  harness::MotionModels m{neural::load_checkpoint(dir / "cnn.ckpt"), neural::load_checkpoint(dir / "convlstm.ckpt"),
                          {}, {}, {}};
  std::ifstream in(dir / "summary.json");
  if (!in) fail(ErrorCode::kIoFailure, "cannot open " + (dir / "summary.json").string());
  json j;
  try {
    j = json::parse(in);
    m.summary = {j.at("classes").get<int>(),          j.at("cnn_val_accuracy").get<double>(),
                 j.at("convlstm_val_accuracy").get<double>(), j.at("ensemble_val_accuracy").get<double>(),
                 j.at("cnn_epochs").get<int>(),        j.at("convlstm_epochs").get<int>()};
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormatVersionMismatch, std::string("bad model summary: ") + e.what());
  }
  return m;
}

harness::MotionModels models_for(const harness::ExperimentConfig& c, const harness::Population& pop,
                                 const std::string& dir) {
  if (!dir.empty()) return load_models(dir);
  return harness::train_motion_models(c, pop);
}

int run(int argc, char** argv) {
  CLI::App app{"Simulator and attack harness for camera-fingerprint authentication"};
  app.require_subcommand(1);

  CommonFlags f;
  std::string out, profiles_path, models_dir, victim, claimant, log_path, input, format = "summary";
  int count = 1, session_index = 0;
  bool wall_time = false;

  auto* sim = app.add_subcommand("simulate-devices", "write the device manifest of a population");
  add_common(sim, f);
  sim->add_option("-o,--out", out, "manifest path")->required();

  auto* reg = app.add_subcommand("register", "enrol every device and write the profile store");
  add_common(reg, f);
  reg->add_option("-o,--out", out, "profile store path")->required();
  reg->add_option("--models", models_dir, "trained motion models (multimodal; trained on the fly otherwise)");

  auto* auth = app.add_subcommand("authenticate", "run one session against the profile store");
  add_common(auth, f);
  auth->add_option("--profiles", profiles_path, "profile store")->required();
  auth->add_option("--device", victim, "claimed device id")->required();
  auth->add_option("--as", claimant, "device that responds (defaults to --device; another id forges)");
  auth->add_option("--session", session_index, "session counter, selects the random streams");
  auth->add_option("--models", models_dir, "trained motion models (multimodal)");
  auth->add_option("--log", log_path, "append the session record to this JSON-lines file");

  auto* atk = app.add_subcommand("attack", "run forged sessions for one (victim, attacker) pair");
  add_common(atk, f);
  atk->add_option("--profiles", profiles_path, "profile store")->required();
  atk->add_option("--victim", victim, "victim device id")->required();
  atk->add_option("--attacker", claimant, "attacker device id")->required();
  atk->add_option("-n,--count", count, "number of sessions")->check(CLI::PositiveNumber);

  auto* trn = app.add_subcommand("train-motion", "pretrain the motion feature extractors");
  add_common(trn, f);
  trn->add_option("-o,--out", out, "model directory")->required();

  auto* ev = app.add_subcommand("evaluate", "full experiment: sweep table, calibration, operating point");
  add_common(ev, f);
  ev->add_option("-o,--out", out, "report stem (writes <stem>.csv and <stem>.json)")->required();
  ev->add_option("--models", models_dir, "trained motion models (multimodal)");
  ev->add_flag("--wall-time", wall_time, "record the run time in the report");

  auto* rep = app.add_subcommand("report", "print a saved report");
  rep->add_option("-i,--input", input, "report JSON")->required();
  rep->add_option("--format", format, "summary | csv | json")->check(CLI::IsMember({"summary", "csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << ordered_json{{"error", "UsageError"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }

  if (*sim) {
    const auto c = resolve_config(f);
    const auto manifest = harness::make_manifest(c);
    harness::save_manifest(manifest, out);
    print_json({{"devices", manifest.devices.size()}, {"out", out}, {"config_hash", harness::config_hash(c)}});
  } else if (*reg) {
    const auto c = resolve_config(f);
    const auto pop = harness::make_population(c);
    auto store = harness::enroll_population(c, pop);
    if (c.scheme == harness::DefenseScheme::kMultimodal) {
      auto models = models_for(c, pop, models_dir);
      const auto pool = harness::negative_pool(c, pop, models);
      for (const auto& phone : pop.phones) store.at(phone.id()).motion = harness::enroll_motion(c, phone, models, pool);
    }
    harness::save_profiles(store, out);
    print_json({{"registered", store.size()}, {"scheme", harness::to_string(c.scheme)}, {"out", out}});
  } else if (*auth) {
    const auto c = resolve_config(f);
    const auto pop = harness::make_population(c);
    const auto store = harness::load_profiles(profiles_path);
    if (claimant.empty()) claimant = victim;
    const auto& profile = store.at(victim);
    const auto& device = pop.cameras.at(pop.index_of(claimant));

    protocol::Verifier verifier(c.challenge_spec());
    std::ofstream log_file;
    std::optional<protocol::SessionLog> log;
    if (!log_path.empty()) {
      log_file.open(log_path, std::ios::app);
      if (!log_file) fail(ErrorCode::kIoFailure, "cannot open " + log_path);
      log.emplace(log_file);
      verifier.set_session_log(&*log);
    }
    auto rng = harness::stream_for(c.seed, "cli/session/" + victim + "/" + claimant + "/" + std::to_string(session_index));
    const auto ch = verifier.issue_challenge(rng);
    std::array<mathcore::ImagePlane, 2> response;
    if (claimant == victim) {
      response = {device.capture(ch.planes[0], rng), device.capture(ch.planes[1], rng)};
    } else {
      auto h = harness::stream_for(c.seed, "harvest/" + victim);
      auto s = harness::stream_for(c.seed, "side/" + claimant);
      const attack::AttackPlan plan{
          device, attack::harvest_victim_fingerprint(pop.cameras.at(pop.index_of(victim)), c.effective_harvest_images(), h),
          attack::estimate_attacker_fingerprint(device, c.effective_side_photos(), s), c.attack};
      response = attack::forge_response(plan, ch.planes, rng);
    }
    const double tau = c.operating_threshold ? *c.operating_threshold : c.verifier.fingerprint_threshold;
    protocol::VerificationVerdict verdict;
    if (c.scheme == harness::DefenseScheme::kMultimodal) {
      if (!profile.motion) fail(ErrorCode::kConfigInvalid, "profile of " + victim + " has no motion fingerprint");
      auto models = models_for(c, pop, models_dir);
      const auto windows = harness::record_samples(c, pop.phones.at(pop.index_of(claimant)), "cli-session/" + std::to_string(session_index), 1);
      verdict = harness::multimodal_verify(verifier, ch.session_id, response, profile, c.verifier_config(tau), &windows[0], &models);
    } else {
      verdict = verifier.verify(ch.session_id, response, profile, c.verifier_config(tau));
    }
    protocol::SessionRecord rec{ch.session_id, victim, verdict, ch.issued_ms, ch.issued_ms};
    std::cout << protocol::to_json_line(rec) << '\n';
  } else if (*atk) {
    const auto c = resolve_config(f);
    const auto pop = harness::make_population(c);
    const auto store = harness::load_profiles(profiles_path);
    const auto& profile = store.at(victim);
    if (victim == claimant) fail(ErrorCode::kConfigInvalid, "victim and attacker must differ");
    const auto& attacker = pop.cameras.at(pop.index_of(claimant));
    auto h = harness::stream_for(c.seed, "harvest/" + victim);
    auto s = harness::stream_for(c.seed, "side/" + claimant);
    const attack::AttackPlan plan{
        attacker, attack::harvest_victim_fingerprint(pop.cameras.at(pop.index_of(victim)), c.effective_harvest_images(), h),
        attack::estimate_attacker_fingerprint(attacker, c.effective_side_photos(), s), c.attack};
    const double tau = c.operating_threshold ? *c.operating_threshold : c.verifier.fingerprint_threshold;
    protocol::Verifier verifier(c.challenge_spec());
    int accepted = 0;
    for (int k = 0; k < count; ++k) {
      auto rng = harness::stream_for(c.seed, "cli/attack/" + victim + "/" + claimant + "/" + std::to_string(k));
      const auto ch = verifier.issue_challenge(rng);
      accepted += verifier.verify(ch.session_id, attack::forge_response(plan, ch.planes, rng), profile,
                                  c.verifier_config(tau)).accepted;
    }
    print_json({{"victim", victim}, {"attacker", claimant}, {"attack", attack::to_string(c.attack)},
                {"threshold", tau}, {"sessions", count}, {"accepted", accepted},
                {"far", static_cast<double>(accepted) / count}});
  } else if (*trn) {
    const auto c = resolve_config(f);
    auto models = harness::train_motion_models(c, harness::make_population(c));
    save_models(models, out);
    const auto& s = models.summary;
    print_json({{"classes", s.classes}, {"cnn_val_accuracy", s.cnn_val_accuracy},
                {"convlstm_val_accuracy", s.convlstm_val_accuracy},
                {"ensemble_val_accuracy", s.ensemble_val_accuracy}, {"out", out}});
  } else if (*ev) {
    const auto c = resolve_config(f);
    const auto started = std::chrono::steady_clock::now();
    std::optional<harness::MotionModels> models;
    if (c.scheme == harness::DefenseScheme::kMultimodal && !models_dir.empty()) models.emplace(load_models(models_dir));
    auto report = harness::run_experiment(c, models ? &*models : nullptr);
    if (wall_time) report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    harness::save_report(report, out);
    ordered_json summary = harness::report_json(report);
    summary.erase("rows");
    summary.erase("config");
    print_json(summary);
  } else if (*rep) {
    const auto report = harness::load_report(input);
    if (format == "csv") {
      std::cout << harness::report_csv(report);
    } else if (format == "json") {
      std::cout << harness::report_json(report).dump(2) << '\n';
    } else {
      ordered_json summary = harness::report_json(report);
      summary.erase("rows");
      summary.erase("config");
      std::cout << summary.dump(2) << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << ordered_json{{"error", to_string(e.code())}, {"message", e.what()}}.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << ordered_json{{"error", "Internal"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
}
