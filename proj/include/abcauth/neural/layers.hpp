#pragma once

#include <memory>
#include <vector>

#include "abcauth/mathcore/random_stream.hpp"
#include "abcauth/neural/tensor.hpp"

namespace abcauth::neural {

struct ForwardContext {
  bool train = false;
  mathcore::RandomStream* rng = nullptr;  // dropout masks; required when training
};

template <class T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor<T> forward(const Tensor<T>& x, const ForwardContext& ctx) = 0;
  // Gradient wrt the last forward input; adds parameter gradients.
  virtual Tensor<T> backward(const Tensor<T>& grad_out) = 0;
  virtual std::vector<Param<T>*> params() { return {}; }
  virtual const char* kind() const = 0;
};

// Glorot-uniform initialisation, bound sqrt(6 / (fan_in + fan_out)).
template <class T>
void glorot_uniform(Mat<T>& w, int fan_in, int fan_out, mathcore::RandomStream& rng);

// Patch matrix of a stride-1, zero-padded, same-size convolution. Row index is
// (dy*kw + dx)*channels + c.
template <class T>
Mat<T> im2col(const Tensor<T>& x, int kh, int kw);
template <class T>
void col2im_add(const Mat<T>& col, Tensor<T>& dx, int kh, int kw);

// Same-size 2d convolution, stride 1. Weight is out x (kh*kw*in).
template <class T>
class Conv2d final : public Layer<T> {
 public:
  Conv2d(int in_channels, int out_channels, int kh, int kw, mathcore::RandomStream& rng);
  Tensor<T> forward(const Tensor<T>& x, const ForwardContext& ctx) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<Param<T>*> params() override { return {&weight_, &bias_}; }
  const char* kind() const override { return "conv2d"; }

 private:
  int in_, out_, kh_, kw_;
  Param<T> weight_, bias_;
  Tensor<T> input_;  // shape only
  Mat<T> col_;
};

// 2x2 stride-2 max pooling; an axis shorter than the window is left alone.
// Odd trailing rows/columns are dropped.
template <class T>
class MaxPool2d final : public Layer<T> {
 public:
  explicit MaxPool2d(int window = 2) : window_(window) {}
  Tensor<T> forward(const Tensor<T>& x, const ForwardContext& ctx) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  const char* kind() const override { return "maxpool2d"; }

  static int pooled(int n, int window) { return n < window ? n : n / window; }

 private:
  int window_;
  Tensor<T> input_shape_;
  std::vector<int> argmax_;  // input column per output element
};

template <class T>
class Dense final : public Layer<T> {
 public:
  Dense(int in, int out, mathcore::RandomStream& rng);
  Tensor<T> forward(const Tensor<T>& x, const ForwardContext& ctx) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<Param<T>*> params() override { return {&weight_, &bias_}; }
  const char* kind() const override { return "dense"; }

 private:
  int in_, out_;
  Param<T> weight_, bias_;
  Mat<T> input_;
  int batch_ = 0;
};

template <class T>
class Relu final : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, const ForwardContext& ctx) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  const char* kind() const override { return "relu"; }

 private:
  Tensor<T> output_;
};

// Inverted dropout: kept units are scaled by 1 / (1 - rate) while training.
template <class T>
class Dropout final : public Layer<T> {
 public:
  explicit Dropout(double rate) : rate_(rate) {}
  Tensor<T> forward(const Tensor<T>& x, const ForwardContext& ctx) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  const char* kind() const override { return "dropout"; }
  double rate() const noexcept { return rate_; }

 private:
  double rate_;
  Mat<T> mask_;
  bool active_ = false;
};

// Maps -> one feature column per sample (pure reshape).
template <class T>
class Flatten final : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, const ForwardContext& ctx) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  const char* kind() const override { return "flatten"; }

 private:
  Tensor<T> input_shape_;
};

// Column-wise softmax of a classes x batch logit matrix.
template <class T>
Mat<T> softmax(const Mat<T>& logits);

// Mean categorical cross-entropy; fills grad (wrt logits) when non-null.
template <class T>
double softmax_cross_entropy(const Mat<T>& logits, const std::vector<int>& labels, Mat<T>* grad);

}  // namespace abcauth::neural
