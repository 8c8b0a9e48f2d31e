#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace abcauth::neural {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

// Batch of feature maps. Column-major `data` is channels x (batch*height*width)
// with column index (b*height + y)*width + x, so the channels of one position
// sit contiguously and a sample's block flattens without reordering
// (flattened feature index = (y*width + x)*channels + c).
template <class T>
struct Tensor {
  int batch = 0;
  int channels = 0;
  int height = 1;
  int width = 1;
  Mat<T> data;

  Tensor() = default;
  Tensor(int b, int c, int h, int w) : batch(b), channels(c), height(h), width(w), data(Mat<T>::Zero(c, b * h * w)) {}

  std::vector<int> shape() const { return {batch, channels, height, width}; }
  int positions() const noexcept { return height * width; }
  bool same_shape(const Tensor& o) const noexcept {
    return batch == o.batch && channels == o.channels && height == o.height && width == o.width;
  }
};

template <class T>
struct Param {
  std::string name;
  Mat<T> value;
  Mat<T> grad;

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

}  // namespace abcauth::neural
