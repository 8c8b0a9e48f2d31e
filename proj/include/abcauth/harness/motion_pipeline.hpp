#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "abcauth/harness/config.hpp"
#include "abcauth/harness/population.hpp"
#include "abcauth/neural/models.hpp"
#include "abcauth/neural/train.hpp"
#include "abcauth/svm/svm.hpp"

namespace abcauth::harness {

// Preprocessed windows of one phone drawn from the stream `purpose/<id>`.
std::vector<motion::MotionSample> record_samples(const ExperimentConfig& config, const motion::MotionDeviceModel& phone,
                                                 const std::string& purpose, int count);

struct MotionSummary {
  int classes = 0;
  double cnn_val_accuracy = 0.0;
  double convlstm_val_accuracy = 0.0;
  double ensemble_val_accuracy = 0.0;  // one-vs-rest SVMs on joint embeddings
  int cnn_epochs = 0;
  int convlstm_epochs = 0;

  friend bool operator==(const MotionSummary&, const MotionSummary&) = default;
};

struct MotionModels {
  neural::Network<float> cnn;
  neural::Network<float> convlstm;
  neural::TrainHistory cnn_history;
  neural::TrainHistory convlstm_history;
  MotionSummary summary;
};

// Multi-class pretraining on the experiment phones plus the extra devices,
// followed by the ensemble check on the held-out split.
MotionModels train_motion_models(const ExperimentConfig& config, const Population& population);

// Embeddings of the pool devices, one row each.
Eigen::MatrixXd negative_pool(const ExperimentConfig& config, const Population& population, MotionModels& models);

// Motion fingerprint of a phone from its registration windows.
svm::MotionFingerprint enroll_motion(const ExperimentConfig& config, const motion::MotionDeviceModel& phone,
                                     MotionModels& models, const Eigen::MatrixXd& pool);

// accept[v][d][s]: phone d's session window s is accepted by victim v's
// motion fingerprint.
struct MotionDecisions {
  std::vector<std::vector<std::vector<signed char>>> accept;
  std::vector<svm::MotionFingerprint> fingerprints;
};

MotionDecisions motion_decisions(const ExperimentConfig& config, const Population& population, MotionModels& models);

}  // namespace abcauth::harness
