#include "abcauth/harness/motion_pipeline.hpp"

#include <algorithm>

#include "abcauth/common/error.hpp"
#include "abcauth/motion/preprocess.hpp"

namespace abcauth::harness {

namespace {

constexpr std::int64_t kFirstShutterMs = 1'700'000'000'000;
constexpr std::int64_t kShutterSpacingMs = 10'000;

neural::ModelSpec cnn_spec(const ExperimentConfig& config, int classes) {
  neural::ModelSpec s = neural::ModelSpec::cnn(classes);
  s.init_seed = derived_seed(config.seed, "init/cnn");
  return s;
}

neural::ModelSpec convlstm_spec(const ExperimentConfig& config, int classes) {
  neural::ModelSpec s = neural::ModelSpec::convlstm(classes);
  s.layout = config.motion.convlstm_layout;
  s.steps = config.motion.convlstm_steps;
  s.init_seed = derived_seed(config.seed, "init/convlstm");
  return s;
}

}  // namespace

std::vector<motion::MotionSample> record_samples(const ExperimentConfig& config, const motion::MotionDeviceModel& phone,
                                                 const std::string& purpose, int count) {
  mathcore::RandomStream rng = stream_for(config.seed, "motion-" + purpose + "/" + phone.id());
  std::vector<motion::MotionSample> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const auto raw = phone.record_window(kFirstShutterMs + i * kShutterSpacingMs, rng);
    out.push_back(motion::preprocess(raw, config.motion.preprocess));
  }
  return out;
}

MotionModels train_motion_models(const ExperimentConfig& config, const Population& population) {
  std::vector<const motion::MotionDeviceModel*> classes;
  for (const auto& p : population.phones) classes.push_back(&p);
  for (const auto& p : population.pretrain_extras) classes.push_back(&p);
  const int class_count = static_cast<int>(classes.size());

  neural::LabeledSet all;
  for (int c = 0; c < class_count; ++c) {
    for (auto& s : record_samples(config, *classes[c], "pretrain", config.motion.pretrain_windows)) {
      all.samples.push_back(std::move(s));
      all.labels.push_back(c);
    }
  }
  auto [train_set, val_set] =
      neural::split_per_class(all, config.motion.train_fraction, derived_seed(config.seed, "pretrain-split"));

  MotionModels m{neural::Network<float>(cnn_spec(config, class_count)),
                 neural::Network<float>(convlstm_spec(config, class_count)),
                 {},
                 {},
                 {}};
  neural::TrainConfig tc = config.motion.train;
  m.cnn_history = neural::train(m.cnn, train_set, val_set, tc);
  tc.seed = derived_seed(tc.seed, "convlstm");
  m.convlstm_history = neural::train(m.convlstm, train_set, val_set, tc);

  m.summary.classes = class_count;
  m.summary.cnn_val_accuracy = neural::evaluate(m.cnn, val_set).accuracy;
  m.summary.convlstm_val_accuracy = neural::evaluate(m.convlstm, val_set).accuracy;
  m.summary.cnn_epochs = static_cast<int>(m.cnn_history.epochs.size());
  m.summary.convlstm_epochs = static_cast<int>(m.convlstm_history.epochs.size());

  const Eigen::MatrixXd train_emb = neural::extract_embeddings(m.cnn, m.convlstm, train_set.samples);
  const Eigen::MatrixXd val_emb = neural::extract_embeddings(m.cnn, m.convlstm, val_set.samples);
  const svm::OneVsRest meta = svm::OneVsRest::train(train_emb, train_set.labels, class_count, config.motion.svm);
  m.summary.ensemble_val_accuracy = meta.accuracy(val_emb, val_set.labels);
  return m;
}

Eigen::MatrixXd negative_pool(const ExperimentConfig& config, const Population& population, MotionModels& models) {
  std::vector<motion::MotionSample> samples;
  for (const auto& p : population.pool) {
    for (auto& s : record_samples(config, p, "pool", config.motion.pool_windows)) samples.push_back(std::move(s));
  }
  if (samples.empty()) fail(ErrorCode::kEmptyPool, "negative pool has no devices");
  return neural::extract_embeddings(models.cnn, models.convlstm, samples);
}

svm::MotionFingerprint enroll_motion(const ExperimentConfig& config, const motion::MotionDeviceModel& phone,
                                     MotionModels& models, const Eigen::MatrixXd& pool) {
  const auto samples = record_samples(config, phone, "register", config.motion.registration_windows);
  const Eigen::MatrixXd pos = neural::extract_embeddings(models.cnn, models.convlstm, samples);
  return svm::svm_train(pos, pool, config.motion.svm);
}

MotionDecisions motion_decisions(const ExperimentConfig& config, const Population& population, MotionModels& models) {
  const Eigen::MatrixXd pool = negative_pool(config, population, models);
  const int n = static_cast<int>(population.phones.size());
  const int windows = std::max(config.genuine_sessions, config.attacks_per_pair);
  std::vector<Eigen::MatrixXd> session_emb;
  for (const auto& phone : population.phones) {
    session_emb.push_back(
        neural::extract_embeddings(models.cnn, models.convlstm, record_samples(config, phone, "session", windows)));
  }
  MotionDecisions out;
  out.accept.assign(n, std::vector<std::vector<signed char>>(n, std::vector<signed char>(windows, 0)));
  for (int v = 0; v < n; ++v) {
    out.fingerprints.push_back(enroll_motion(config, population.phones[v], models, pool));
    for (int d = 0; d < n; ++d) {
      for (int s = 0; s < windows; ++s) {
        out.accept[v][d][s] = svm::svm_decide(out.fingerprints[v], session_emb[d].row(s).transpose()) > 0 ? 1 : 0;
      }
    }
  }
  return out;
}

}  // namespace abcauth::harness
