#pragma once

#include <vector>

#include "abcauth/neural/layers.hpp"

namespace abcauth::neural {

// Convolutional LSTM cell with 1 x k kernels over the concatenation of the
// step input and the previous hidden state, no peepholes:
//
//   [i f o g] = conv([x_t; h_{t-1}]) + b
//   c_t = sigmoid(f) * c_{t-1} + sigmoid(i) * tanh(g)
//   h_t = sigmoid(o) * tanh(c_t)
//
// Forget-gate biases start at 1, the rest at 0.
template <class T>
class ConvLstmCell {
 public:
  ConvLstmCell(int in_channels, int hidden, int kernel_width, mathcore::RandomStream& rng);

  // Whole sequence from zero initial state.
  std::vector<Tensor<T>> forward(const std::vector<Tensor<T>>& xs, bool keep_cache);
  // grad_hs[t] is the loss gradient wrt h_t from outside the recurrence.
  std::vector<Tensor<T>> backward(const std::vector<Tensor<T>>& grad_hs);

  std::vector<Param<T>*> params() { return {&weight_, &bias_}; }
  int hidden() const noexcept { return hidden_; }
  int in_channels() const noexcept { return in_; }

  // Most recent cell states (kept for inspection in tests).
  const std::vector<Mat<T>>& cell_states() const noexcept { return c_; }

 private:
  int in_, hidden_, kw_;
  Param<T> weight_, bias_;
  int batch_ = 0, height_ = 0, width_ = 0;
  std::vector<Mat<T>> col_, i_, f_, o_, g_, c_, tanh_c_;
};

enum class SequenceLayout {
  kSensorChannels,  // step t: the 6 sensor rows as input channels over a 1 x (150/T) map
  kSpatialMaps,     // step t: one 6 x (150/T) map
};

// Splits each 1 x rows x cols sample into `steps` column chunks, runs the
// stacked cells and returns the last layer's final hidden state.
template <class T>
class ConvLstmBlock final : public Layer<T> {
 public:
  ConvLstmBlock(int rows, int cols, int steps, SequenceLayout layout, const std::vector<int>& widths,
                int kernel_width, mathcore::RandomStream& rng);
  Tensor<T> forward(const Tensor<T>& x, const ForwardContext& ctx) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<Param<T>*> params() override;
  const char* kind() const override { return "convlstm"; }

  int output_channels() const { return cells_.back().hidden(); }
  int output_height() const { return layout_ == SequenceLayout::kSensorChannels ? 1 : rows_; }
  int output_width() const { return cols_ / steps_; }
  std::vector<ConvLstmCell<T>>& cells() { return cells_; }

  std::vector<Tensor<T>> split(const Tensor<T>& x) const;
  Tensor<T> merge(const std::vector<Tensor<T>>& steps) const;

 private:
  int rows_, cols_, steps_;
  SequenceLayout layout_;
  std::vector<ConvLstmCell<T>> cells_;
  int batch_ = 0;
};

}  // namespace abcauth::neural
