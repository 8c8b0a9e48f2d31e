#pragma once

#include <cstdint>
#include <vector>

#include "abcauth/motion/recording.hpp"
#include "abcauth/neural/models.hpp"

namespace abcauth::neural {

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
  int max_epochs = 50;
  int patience = 3;  // epochs without a validation-accuracy gain before stopping
  std::uint64_t seed = 1;
  bool restore_best = true;
  bool stop_at_perfect_validation = true;
};

struct LabeledSet {
  std::vector<motion::MotionSample> samples;
  std::vector<int> labels;

  std::size_t size() const noexcept { return samples.size(); }
};

// Per-class split keeping `train_fraction` of every class for training; the
// order within a class is shuffled deterministically from the seed.
std::pair<LabeledSet, LabeledSet> split_per_class(const LabeledSet& all, double train_fraction, std::uint64_t seed);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_val_accuracy = 0.0;
  bool stopped_early = false;
};

template <class T>
class Adam {
 public:
  Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8)
      : lr_(learning_rate), b1_(beta1), b2_(beta2), eps_(epsilon) {}
  void step(const std::vector<Param<T>*>& params);

 private:
  double lr_, b1_, b2_, eps_;
  long t_ = 0;
  std::vector<Mat<T>> m_, v_;
};

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

template <class T>
Evaluation evaluate(Network<T>& net, const LabeledSet& data);

// Mini-batch Adam on mean cross-entropy with early stopping on validation
// accuracy. Throws DegenerateDataset for fewer than two classes.
template <class T>
TrainHistory train(Network<T>& net, const LabeledSet& train_set, const LabeledSet& val_set, const TrainConfig& config);

}  // namespace abcauth::neural
