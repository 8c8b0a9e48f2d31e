#include "abcauth/neural/layers.hpp"

#include <cmath>
#include <limits>

#include "abcauth/common/error.hpp"

namespace abcauth::neural {

template <class T>
void glorot_uniform(Mat<T>& w, int fan_in, int fan_out, mathcore::RandomStream& rng) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<T>(rng.uniform(-bound, bound));
}

template <class T>
Mat<T> im2col(const Tensor<T>& x, int kh, int kw) {
  const int C = x.channels, H = x.height, W = x.width;
  const int ph = kh / 2, pw = kw / 2;
  Mat<T> col = Mat<T>::Zero(static_cast<Eigen::Index>(kh) * kw * C, static_cast<Eigen::Index>(x.batch) * H * W);
  for (int b = 0; b < x.batch; ++b) {
    for (int y = 0; y < H; ++y) {
      for (int xx = 0; xx < W; ++xx) {
        const Eigen::Index p = (static_cast<Eigen::Index>(b) * H + y) * W + xx;
        T* dst = col.col(p).data();
        for (int dy = 0; dy < kh; ++dy) {
          const int sy = y + dy - ph;
          if (sy < 0 || sy >= H) continue;
          for (int dx = 0; dx < kw; ++dx) {
            const int sx = xx + dx - pw;
            if (sx < 0 || sx >= W) continue;
            const T* src = x.data.col((static_cast<Eigen::Index>(b) * H + sy) * W + sx).data();
            T* out = dst + (dy * kw + dx) * C;
            for (int c = 0; c < C; ++c) out[c] = src[c];
          }
        }
      }
    }
  }
  return col;
}

template <class T>
void col2im_add(const Mat<T>& col, Tensor<T>& dx, int kh, int kw) {
  const int C = dx.channels, H = dx.height, W = dx.width;
  const int ph = kh / 2, pw = kw / 2;
  for (int b = 0; b < dx.batch; ++b) {
    for (int y = 0; y < H; ++y) {
      for (int xx = 0; xx < W; ++xx) {
        const Eigen::Index p = (static_cast<Eigen::Index>(b) * H + y) * W + xx;
        const T* src = col.col(p).data();
        for (int dy = 0; dy < kh; ++dy) {
          const int sy = y + dy - ph;
          if (sy < 0 || sy >= H) continue;
          for (int dxx = 0; dxx < kw; ++dxx) {
            const int sx = xx + dxx - pw;
            if (sx < 0 || sx >= W) continue;
            T* out = dx.data.col((static_cast<Eigen::Index>(b) * H + sy) * W + sx).data();
            const T* in = src + (dy * kw + dxx) * C;
            for (int c = 0; c < C; ++c) out[c] += in[c];
          }
        }
      }
    }
  }
}

// ---- Conv2d ----

template <class T>
Conv2d<T>::Conv2d(int in_channels, int out_channels, int kh, int kw, mathcore::RandomStream& rng)
    : in_(in_channels), out_(out_channels), kh_(kh), kw_(kw) {
  weight_.name = "weight";
  weight_.value.resize(out_, static_cast<Eigen::Index>(kh_) * kw_ * in_);
  glorot_uniform(weight_.value, in_ * kh_ * kw_, out_ * kh_ * kw_, rng);
  bias_.name = "bias";
  bias_.value = Mat<T>::Zero(out_, 1);
  weight_.zero_grad();
  bias_.zero_grad();
}

template <class T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x, const ForwardContext& ctx) {
  if (x.channels != in_) fail(ErrorCode::kShapeMismatch, "conv2d input channel count mismatch");
  col_ = im2col(x, kh_, kw_);
  Tensor<T> y;
  y.batch = x.batch;
  y.channels = out_;
  y.height = x.height;
  y.width = x.width;
  y.data.noalias() = weight_.value * col_;
  y.data.colwise() += bias_.value.col(0);
  input_.batch = x.batch;
  input_.channels = x.channels;
  input_.height = x.height;
  input_.width = x.width;
  if (!ctx.train) col_.resize(0, 0);
  return y;
}

template <class T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& g) {
  if (col_.size() == 0) fail(ErrorCode::kShapeMismatch, "conv2d backward without a training forward pass");
  weight_.grad.noalias() += g.data * col_.transpose();
  bias_.grad.col(0) += g.data.rowwise().sum();
  Mat<T> dcol = weight_.value.transpose() * g.data;
  Tensor<T> dx(input_.batch, input_.channels, input_.height, input_.width);
  col2im_add(dcol, dx, kh_, kw_);
  return dx;
}

// ---- MaxPool2d ----

template <class T>
Tensor<T> MaxPool2d<T>::forward(const Tensor<T>& x, const ForwardContext&) {
  const int wy = x.height < window_ ? 1 : window_;
  const int wx = x.width < window_ ? 1 : window_;
  const int oh = pooled(x.height, window_), ow = pooled(x.width, window_);
  Tensor<T> y;
  y.batch = x.batch;
  y.channels = x.channels;
  y.height = oh;
  y.width = ow;
  y.data.resize(x.channels, static_cast<Eigen::Index>(x.batch) * oh * ow);
  argmax_.assign(static_cast<std::size_t>(y.data.size()), 0);
  input_shape_ = Tensor<T>();
  input_shape_.batch = x.batch;
  input_shape_.channels = x.channels;
  input_shape_.height = x.height;
  input_shape_.width = x.width;
  const int C = x.channels;
  for (int b = 0; b < x.batch; ++b) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        const Eigen::Index op = (static_cast<Eigen::Index>(b) * oh + oy) * ow + ox;
        T* out = y.data.col(op).data();
        int* arg = argmax_.data() + op * C;
        for (int c = 0; c < C; ++c) {
          out[c] = -std::numeric_limits<T>::infinity();
          arg[c] = -1;
        }
        for (int dy = 0; dy < wy; ++dy) {
          for (int dx = 0; dx < wx; ++dx) {
            const int ip = (b * x.height + oy * wy + dy) * x.width + ox * wx + dx;
            const T* in = x.data.col(ip).data();
            for (int c = 0; c < C; ++c) {
              if (in[c] > out[c]) {
                out[c] = in[c];
                arg[c] = ip;
              }
            }
          }
        }
      }
    }
  }
  return y;
}

template <class T>
Tensor<T> MaxPool2d<T>::backward(const Tensor<T>& g) {
  Tensor<T> dx(input_shape_.batch, input_shape_.channels, input_shape_.height, input_shape_.width);
  const int C = g.channels;
  for (Eigen::Index op = 0; op < g.data.cols(); ++op) {
    const int* arg = argmax_.data() + op * C;
    for (int c = 0; c < C; ++c) {
      if (arg[c] >= 0) dx.data(c, arg[c]) += g.data(c, op);
    }
  }
  return dx;
}

// ---- Dense ----

template <class T>
Dense<T>::Dense(int in, int out, mathcore::RandomStream& rng) : in_(in), out_(out) {
  weight_.name = "weight";
  weight_.value.resize(out_, in_);
  glorot_uniform(weight_.value, in_, out_, rng);
  bias_.name = "bias";
  bias_.value = Mat<T>::Zero(out_, 1);
  weight_.zero_grad();
  bias_.zero_grad();
}

template <class T>
Tensor<T> Dense<T>::forward(const Tensor<T>& x, const ForwardContext&) {
  if (x.channels != in_ || x.positions() != 1) fail(ErrorCode::kShapeMismatch, "dense input width mismatch");
  input_ = x.data;
  batch_ = x.batch;
  Tensor<T> y;
  y.batch = x.batch;
  y.channels = out_;
  y.data.noalias() = weight_.value * x.data;
  y.data.colwise() += bias_.value.col(0);
  return y;
}

template <class T>
Tensor<T> Dense<T>::backward(const Tensor<T>& g) {
  weight_.grad.noalias() += g.data * input_.transpose();
  bias_.grad.col(0) += g.data.rowwise().sum();
  Tensor<T> dx;
  dx.batch = batch_;
  dx.channels = in_;
  dx.data.noalias() = weight_.value.transpose() * g.data;
  return dx;
}

// ---- Relu ----

template <class T>
Tensor<T> Relu<T>::forward(const Tensor<T>& x, const ForwardContext&) {
  output_ = x;
  output_.data = x.data.cwiseMax(T(0));
  return output_;
}

template <class T>
Tensor<T> Relu<T>::backward(const Tensor<T>& g) {
  Tensor<T> dx = g;
  dx.data = (output_.data.array() > T(0)).select(g.data, T(0));
  return dx;
}

// ---- Dropout ----

template <class T>
Tensor<T> Dropout<T>::forward(const Tensor<T>& x, const ForwardContext& ctx) {
  active_ = ctx.train && rate_ > 0.0;
  if (!active_) return x;
  if (ctx.rng == nullptr) fail(ErrorCode::kConfigInvalid, "dropout in training mode needs a random stream");
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate_));
  mask_.resize(x.data.rows(), x.data.cols());
  for (Eigen::Index i = 0; i < mask_.size(); ++i) {
    mask_.data()[i] = ctx.rng->uniform() >= rate_ ? keep_scale : T(0);
  }
  Tensor<T> y = x;
  y.data = x.data.cwiseProduct(mask_);
  return y;
}

template <class T>
Tensor<T> Dropout<T>::backward(const Tensor<T>& g) {
  if (!active_) return g;
  Tensor<T> dx = g;
  dx.data = g.data.cwiseProduct(mask_);
  return dx;
}

// ---- Flatten ----

template <class T>
Tensor<T> Flatten<T>::forward(const Tensor<T>& x, const ForwardContext&) {
  input_shape_ = Tensor<T>();
  input_shape_.batch = x.batch;
  input_shape_.channels = x.channels;
  input_shape_.height = x.height;
  input_shape_.width = x.width;
  Tensor<T> y;
  y.batch = x.batch;
  y.channels = x.channels * x.positions();
  y.data = Eigen::Map<const Mat<T>>(x.data.data(), y.channels, x.batch);
  return y;
}

template <class T>
Tensor<T> Flatten<T>::backward(const Tensor<T>& g) {
  Tensor<T> dx;
  dx.batch = input_shape_.batch;
  dx.channels = input_shape_.channels;
  dx.height = input_shape_.height;
  dx.width = input_shape_.width;
  dx.data = Eigen::Map<const Mat<T>>(g.data.data(), dx.channels,
                                     static_cast<Eigen::Index>(dx.batch) * dx.height * dx.width);
  return dx;
}

// ---- softmax / cross-entropy ----

template <class T>
Mat<T> softmax(const Mat<T>& logits) {
  Mat<T> p(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    const T m = logits.col(j).maxCoeff();
    p.col(j) = (logits.col(j).array() - m).exp().matrix();
    p.col(j) /= p.col(j).sum();
  }
  return p;
}

template <class T>
double softmax_cross_entropy(const Mat<T>& logits, const std::vector<int>& labels, Mat<T>* grad) {
  if (static_cast<Eigen::Index>(labels.size()) != logits.cols()) {
    fail(ErrorCode::kShapeMismatch, "label count does not match batch");
  }
  const Eigen::Index n = logits.cols();
  double loss = 0.0;
  if (grad != nullptr) grad->resize(logits.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const int y = labels[j];
    if (y < 0 || y >= logits.rows()) fail(ErrorCode::kShapeMismatch, "label out of range");
    const double m = static_cast<double>(logits.col(j).maxCoeff());
    double z = 0.0;
    for (Eigen::Index k = 0; k < logits.rows(); ++k) z += std::exp(static_cast<double>(logits(k, j)) - m);
    const double log_z = m + std::log(z);
    loss += log_z - static_cast<double>(logits(y, j));
    if (grad != nullptr) {
      for (Eigen::Index k = 0; k < logits.rows(); ++k) {
        const double p = std::exp(static_cast<double>(logits(k, j)) - log_z);
        (*grad)(k, j) = static_cast<T>((p - (k == y ? 1.0 : 0.0)) / n);
      }
    }
  }
  return loss / n;
}

#define ABCAUTH_INSTANTIATE(T)                                                                      \
  template void glorot_uniform<T>(Mat<T>&, int, int, mathcore::RandomStream&);                      \
  template Mat<T> im2col<T>(const Tensor<T>&, int, int);                                            \
  template void col2im_add<T>(const Mat<T>&, Tensor<T>&, int, int);                                 \
  template class Conv2d<T>;                                                                         \
  template class MaxPool2d<T>;                                                                      \
  template class Dense<T>;                                                                          \
  template class Relu<T>;                                                                           \
  template class Dropout<T>;                                                                        \
  template class Flatten<T>;                                                                        \
  template Mat<T> softmax<T>(const Mat<T>&);                                                        \
  template double softmax_cross_entropy<T>(const Mat<T>&, const std::vector<int>&, Mat<T>*);

ABCAUTH_INSTANTIATE(float)
ABCAUTH_INSTANTIATE(double)

#undef ABCAUTH_INSTANTIATE

}  // namespace abcauth::neural
