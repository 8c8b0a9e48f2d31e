#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "abcauth/motion/recording.hpp"
#include "abcauth/neural/convlstm.hpp"
#include "abcauth/neural/layers.hpp"

namespace abcauth::neural {

enum class ModelKind { kCnn, kConvLstm };

std::string_view to_string(ModelKind kind);
std::string_view to_string(SequenceLayout layout);

struct ModelSpec {
  ModelKind kind = ModelKind::kCnn;
  int input_rows = motion::kChannelCount;
  int input_cols = motion::kSampleLength;
  int classes = 10;
  std::vector<int> conv_widths{32, 64, 128};  // cnn
  int conv_kernel = 3;
  std::vector<int> cell_widths{64, 128, 256};  // convlstm
  int cell_kernel = 3;
  int steps = 10;
  SequenceLayout layout = SequenceLayout::kSensorChannels;
  std::vector<int> dense_widths{256, 256};
  double dropout = 0.4;
  std::uint64_t init_seed = 1;

  static ModelSpec cnn(int classes);
  static ModelSpec convlstm(int classes);

  // Stable text form, stored in checkpoints.
  std::string descriptor() const;
  static ModelSpec from_descriptor(const std::string& text);
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Ordered stack of layers ending in class logits. The embedding is the output
// of the last hidden dense block (after its activation).
template <class T>
class Network {
 public:
  explicit Network(ModelSpec spec);

  const ModelSpec& spec() const noexcept { return spec_; }
  Tensor<T> forward(const Tensor<T>& x, const ForwardContext& ctx);
  void backward(const Tensor<T>& grad_logits);
  Tensor<T> embed(const Tensor<T>& x);
  std::vector<Param<T>*> params();
  void zero_grad();
  std::size_t parameter_count();

  // Output shapes of every layer for one forward pass, in order.
  std::vector<std::vector<int>> shape_trace(const Tensor<T>& x);
  const std::vector<std::unique_ptr<Layer<T>>>& layers() const noexcept { return layers_; }

 private:
  ModelSpec spec_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
  std::size_t embedding_layer_ = 0;  // index whose output is the embedding
};

// Stacks preprocessed samples into a single-channel batch.
template <class T>
Tensor<T> to_batch(const std::vector<motion::MotionSample>& samples, const std::vector<std::size_t>& index);
template <class T>
Tensor<T> to_batch(const std::vector<motion::MotionSample>& samples);

struct Prediction {
  Eigen::MatrixXd probabilities;  // classes x batch
};

// Class probabilities; dropout only when ctx.train.
template <class T>
Prediction predict(Network<T>& net, const Tensor<T>& x, const ForwardContext& ctx = {});

inline constexpr int kEmbeddingWidth = 512;

// [cnn features | convlstm features], inference mode.
Eigen::VectorXd extract_embedding(Network<float>& cnn, Network<float>& convlstm, const motion::MotionSample& sample);
// Row per sample.
Eigen::MatrixXd extract_embeddings(Network<float>& cnn, Network<float>& convlstm,
                                   const std::vector<motion::MotionSample>& samples);
Eigen::MatrixXd extract_features(Network<float>& net, const std::vector<motion::MotionSample>& samples);

}  // namespace abcauth::neural
