#include "abcauth/neural/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "abcauth/common/error.hpp"

namespace abcauth::neural {

namespace {

void shuffle(std::vector<std::size_t>& v, mathcore::RandomStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
    std::swap(v[i - 1], v[j]);
  }
}

void check_labels(const LabeledSet& data, int classes, const char* what) {
  if (data.samples.size() != data.labels.size()) {
    fail(ErrorCode::kShapeMismatch, std::string(what) + ": sample/label count mismatch");
  }
  for (int y : data.labels) {
    if (y < 0 || y >= classes) fail(ErrorCode::kShapeMismatch, std::string(what) + ": label out of range");
  }
}

}  // namespace

std::pair<LabeledSet, LabeledSet> split_per_class(const LabeledSet& all, double train_fraction, std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < all.labels.size(); ++i) by_class[all.labels[i]].push_back(i);
  mathcore::RandomStream rng = mathcore::RandomStream(seed).derive("split");
  LabeledSet tr, va;
  for (auto& [label, idx] : by_class) {
    shuffle(idx, rng);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      LabeledSet& dst = k < n_train ? tr : va;
      dst.samples.push_back(all.samples[idx[k]]);
      dst.labels.push_back(label);
    }
  }
  return {std::move(tr), std::move(va)};
}

template <class T>
void Adam<T>::step(const std::vector<Param<T>*>& params) {
  if (m_.empty()) {
    for (Param<T>* p : params) {
      m_.push_back(Mat<T>::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Mat<T>::Zero(p->value.rows(), p->value.cols()));
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  const T step = static_cast<T>(lr_ / c1);
  const T inv_c2 = static_cast<T>(1.0 / c2);
  const T b1 = static_cast<T>(b1_), b2 = static_cast<T>(b2_), eps = static_cast<T>(eps_);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Param<T>& p = *params[k];
    m_[k] = b1 * m_[k] + (T(1) - b1) * p.grad;
    v_[k] = b2 * v_[k] + (T(1) - b2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= step * m_[k].array() / ((v_[k].array() * inv_c2).sqrt() + eps);
  }
}

template <class T>
Evaluation evaluate(Network<T>& net, const LabeledSet& data) {
  check_labels(data, net.spec().classes, "evaluation set");
  if (data.size() == 0) return {};
  constexpr std::size_t kChunk = 64;
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < data.size(); start += kChunk) {
    std::vector<std::size_t> idx;
    std::vector<int> labels;
    for (std::size_t i = start; i < std::min(data.size(), start + kChunk); ++i) {
      idx.push_back(i);
      labels.push_back(data.labels[i]);
    }
    const Tensor<T> logits = net.forward(to_batch<T>(data.samples, idx), ForwardContext{});
    loss += softmax_cross_entropy<T>(logits.data, labels, nullptr) * idx.size();
    for (std::size_t j = 0; j < idx.size(); ++j) {
      Eigen::Index arg;
      logits.data.col(static_cast<Eigen::Index>(j)).maxCoeff(&arg);
      correct += arg == labels[j] ? 1 : 0;
    }
  }
  return {loss / data.size(), static_cast<double>(correct) / data.size()};
}

template <class T>
TrainHistory train(Network<T>& net, const LabeledSet& train_set, const LabeledSet& val_set, const TrainConfig& config) {
  if (config.learning_rate < 0 || config.batch_size <= 0 || config.max_epochs <= 0 || config.patience <= 0) {
    fail(ErrorCode::kConfigInvalid, "training configuration values must be positive");
  }
  check_labels(train_set, net.spec().classes, "training set");
  check_labels(val_set, net.spec().classes, "validation set");
  if (std::set<int>(train_set.labels.begin(), train_set.labels.end()).size() < 2) {
    fail(ErrorCode::kDegenerateDataset, "training needs at least two classes");
  }

  mathcore::RandomStream rng = mathcore::RandomStream(config.seed).derive("train");
  mathcore::RandomStream dropout_rng = rng.derive("dropout");
  Adam<T> adam(config.learning_rate);
  const auto params = net.params();

  TrainHistory history;
  std::vector<Mat<T>> best;
  int since_best = 0;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle(order, rng);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      std::vector<std::size_t> idx(order.begin() + start,
                                   order.begin() + std::min(order.size(), start + config.batch_size));
      std::vector<int> labels;
      labels.reserve(idx.size());
      for (std::size_t i : idx) labels.push_back(train_set.labels[i]);

      net.zero_grad();
      ForwardContext ctx{true, &dropout_rng};
      const Tensor<T> logits = net.forward(to_batch<T>(train_set.samples, idx), ctx);
      Tensor<T> grad;
      grad.batch = logits.batch;
      grad.channels = logits.channels;
      loss_sum += softmax_cross_entropy<T>(logits.data, labels, &grad.data) * idx.size();
      for (std::size_t j = 0; j < idx.size(); ++j) {
        Eigen::Index arg;
        logits.data.col(static_cast<Eigen::Index>(j)).maxCoeff(&arg);
        correct += arg == labels[j] ? 1 : 0;
      }
      net.backward(grad);
      adam.step(params);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / train_set.size();
    rec.train_accuracy = static_cast<double>(correct) / train_set.size();
    const Evaluation val = evaluate(net, val_set);
    rec.val_loss = val.loss;
    rec.val_accuracy = val.accuracy;
    history.epochs.push_back(rec);

    if (history.best_epoch == 0 || rec.val_accuracy > history.best_val_accuracy) {
      history.best_epoch = epoch;
      history.best_val_accuracy = rec.val_accuracy;
      since_best = 0;
      if (config.restore_best) {
        best.clear();
        for (Param<T>* p : params) best.push_back(p->value);
      }
    } else if (++since_best >= config.patience) {
      history.stopped_early = epoch < config.max_epochs;
      break;
    }
    if (config.stop_at_perfect_validation && val_set.size() > 0 && rec.val_accuracy >= 1.0) {
      // Nothing left to gain on the held-out criterion.
      history.stopped_early = epoch < config.max_epochs;
      break;
    }
  }
  if (config.restore_best && !best.empty()) {
    for (std::size_t k = 0; k < params.size(); ++k) params[k]->value = best[k];
  }
  return history;
}

template class Adam<float>;
template class Adam<double>;
template Evaluation evaluate<float>(Network<float>&, const LabeledSet&);
template Evaluation evaluate<double>(Network<double>&, const LabeledSet&);
template TrainHistory train<float>(Network<float>&, const LabeledSet&, const LabeledSet&, const TrainConfig&);
template TrainHistory train<double>(Network<double>&, const LabeledSet&, const LabeledSet&, const TrainConfig&);

}  // namespace abcauth::neural
