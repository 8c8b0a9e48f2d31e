#include <cmath>

#include "abcauth/common/error.hpp"
#include "abcauth/neural/convlstm.hpp"

namespace abcauth::neural {

namespace {

template <class T>
Mat<T> sigmoid(const Mat<T>& z) {
  return (T(1) / (T(1) + (-z.array()).exp())).matrix();
}

}  // namespace

template <class T>
ConvLstmCell<T>::ConvLstmCell(int in_channels, int hidden, int kernel_width, mathcore::RandomStream& rng)
    : in_(in_channels), hidden_(hidden), kw_(kernel_width) {
  const int fan_in = kw_ * (in_ + hidden_);
  weight_.name = "weight";
  weight_.value.resize(4 * hidden_, fan_in);
  glorot_uniform(weight_.value, fan_in, kw_ * 4 * hidden_, rng);
  bias_.name = "bias";
  bias_.value = Mat<T>::Zero(4 * hidden_, 1);
  bias_.value.block(hidden_, 0, hidden_, 1).setConstant(T(1));
  weight_.zero_grad();
  bias_.zero_grad();
}

template <class T>
std::vector<Tensor<T>> ConvLstmCell<T>::forward(const std::vector<Tensor<T>>& xs, bool keep_cache) {
  if (xs.empty()) fail(ErrorCode::kShapeMismatch, "convlstm needs at least one step");
  const Tensor<T>& x0 = xs.front();
  if (x0.channels != in_) fail(ErrorCode::kShapeMismatch, "convlstm input channel count mismatch");
  batch_ = x0.batch;
  height_ = x0.height;
  width_ = x0.width;
  const Eigen::Index n = static_cast<Eigen::Index>(batch_) * height_ * width_;
  const int H = hidden_;

  col_.clear();
  i_.clear();
  f_.clear();
  o_.clear();
  g_.clear();
  c_.clear();
  tanh_c_.clear();

  Mat<T> h = Mat<T>::Zero(H, n);
  Mat<T> c = Mat<T>::Zero(H, n);
  std::vector<Tensor<T>> hs;
  hs.reserve(xs.size());
  Tensor<T> concat;
  concat.batch = batch_;
  concat.channels = in_ + H;
  concat.height = height_;
  concat.width = width_;
  for (const Tensor<T>& x : xs) {
    if (x.channels != in_ || x.batch != batch_ || x.height != height_ || x.width != width_) {
      fail(ErrorCode::kShapeMismatch, "convlstm steps must share one shape");
    }
    concat.data.resize(in_ + H, n);
    concat.data.topRows(in_) = x.data;
    concat.data.bottomRows(H) = h;
    Mat<T> col = im2col(concat, 1, kw_);
    Mat<T> z = weight_.value * col;
    z.colwise() += bias_.value.col(0);
    Mat<T> gi = sigmoid<T>(z.topRows(H));
    Mat<T> gf = sigmoid<T>(z.middleRows(H, H));
    Mat<T> go = sigmoid<T>(z.middleRows(2 * H, H));
    Mat<T> gg = z.bottomRows(H).array().tanh().matrix();
    c = gf.cwiseProduct(c) + gi.cwiseProduct(gg);
    Mat<T> tc = c.array().tanh().matrix();
    h = go.cwiseProduct(tc);

    Tensor<T> out;
    out.batch = batch_;
    out.channels = H;
    out.height = height_;
    out.width = width_;
    out.data = h;
    hs.push_back(std::move(out));

    c_.push_back(c);
    if (keep_cache) {
      col_.push_back(std::move(col));
      i_.push_back(std::move(gi));
      f_.push_back(std::move(gf));
      o_.push_back(std::move(go));
      g_.push_back(std::move(gg));
      tanh_c_.push_back(std::move(tc));
    }
  }
  return hs;
}

template <class T>
std::vector<Tensor<T>> ConvLstmCell<T>::backward(const std::vector<Tensor<T>>& grad_hs) {
  const std::size_t steps = col_.size();
  if (steps == 0 || grad_hs.size() != steps) {
    fail(ErrorCode::kShapeMismatch, "convlstm backward needs a cached forward pass of equal length");
  }
  const int H = hidden_;
  const Eigen::Index n = static_cast<Eigen::Index>(batch_) * height_ * width_;
  std::vector<Tensor<T>> dxs(steps);
  Mat<T> dh_next = Mat<T>::Zero(H, n);
  Mat<T> dc_next = Mat<T>::Zero(H, n);
  Mat<T> dz(4 * H, n);
  Tensor<T> dconcat;
  for (std::size_t s = steps; s-- > 0;) {
    Mat<T> dh = dh_next;
    if (grad_hs[s].data.size() != 0) dh += grad_hs[s].data;
    const Mat<T>& gi = i_[s];
    const Mat<T>& gf = f_[s];
    const Mat<T>& go = o_[s];
    const Mat<T>& gg = g_[s];
    const Mat<T>& tc = tanh_c_[s];
    Mat<T> dc = dc_next + dh.cwiseProduct(go).cwiseProduct((T(1) - tc.array().square()).matrix());
    const Mat<T> c_prev = s > 0 ? c_[s - 1] : Mat<T>::Zero(H, n);

    dz.topRows(H) = dc.cwiseProduct(gg).cwiseProduct(gi.cwiseProduct((T(1) - gi.array()).matrix()));
    dz.middleRows(H, H) = dc.cwiseProduct(c_prev).cwiseProduct(gf.cwiseProduct((T(1) - gf.array()).matrix()));
    dz.middleRows(2 * H, H) = dh.cwiseProduct(tc).cwiseProduct(go.cwiseProduct((T(1) - go.array()).matrix()));
    dz.bottomRows(H) = dc.cwiseProduct(gi).cwiseProduct((T(1) - gg.array().square()).matrix());
    dc_next = dc.cwiseProduct(gf);

    weight_.grad.noalias() += dz * col_[s].transpose();
    bias_.grad.col(0) += dz.rowwise().sum();
    Mat<T> dcol = weight_.value.transpose() * dz;
    dconcat = Tensor<T>(batch_, in_ + H, height_, width_);
    col2im_add(dcol, dconcat, 1, kw_);

    Tensor<T> dx;
    dx.batch = batch_;
    dx.channels = in_;
    dx.height = height_;
    dx.width = width_;
    dx.data = dconcat.data.topRows(in_);
    dxs[s] = std::move(dx);
    dh_next = dconcat.data.bottomRows(H);
  }
  return dxs;
}

// ---- ConvLstmBlock ----

template <class T>
ConvLstmBlock<T>::ConvLstmBlock(int rows, int cols, int steps, SequenceLayout layout, const std::vector<int>& widths,
                                int kernel_width, mathcore::RandomStream& rng)
    : rows_(rows), cols_(cols), steps_(steps), layout_(layout) {
  if (steps_ <= 0 || cols_ % steps_ != 0) fail(ErrorCode::kShapeMismatch, "sample width must split evenly into steps");
  if (widths.empty()) fail(ErrorCode::kConfigInvalid, "convlstm needs at least one cell");
  int in = layout_ == SequenceLayout::kSensorChannels ? rows_ : 1;
  for (int w : widths) {
    cells_.emplace_back(in, w, kernel_width, rng);
    in = w;
  }
}

template <class T>
std::vector<Tensor<T>> ConvLstmBlock<T>::split(const Tensor<T>& x) const {
  if (x.channels != 1 || x.height != rows_ || x.width != cols_) {
    fail(ErrorCode::kShapeMismatch, "convlstm expects single-channel rows x cols samples");
  }
  const int cw = cols_ / steps_;
  const bool sensor = layout_ == SequenceLayout::kSensorChannels;
  std::vector<Tensor<T>> out;
  out.reserve(steps_);
  for (int t = 0; t < steps_; ++t) {
    Tensor<T> s = sensor ? Tensor<T>(x.batch, rows_, 1, cw) : Tensor<T>(x.batch, 1, rows_, cw);
    for (int b = 0; b < x.batch; ++b) {
      for (int r = 0; r < rows_; ++r) {
        for (int j = 0; j < cw; ++j) {
          const T v = x.data(0, (static_cast<Eigen::Index>(b) * rows_ + r) * cols_ + t * cw + j);
          if (sensor) {
            s.data(r, static_cast<Eigen::Index>(b) * cw + j) = v;
          } else {
            s.data(0, (static_cast<Eigen::Index>(b) * rows_ + r) * cw + j) = v;
          }
        }
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

template <class T>
Tensor<T> ConvLstmBlock<T>::merge(const std::vector<Tensor<T>>& steps) const {
  const int cw = cols_ / steps_;
  const bool sensor = layout_ == SequenceLayout::kSensorChannels;
  const int batch = steps.front().batch;
  Tensor<T> x(batch, 1, rows_, cols_);
  for (int t = 0; t < steps_; ++t) {
    const Tensor<T>& s = steps[t];
    for (int b = 0; b < batch; ++b) {
      for (int r = 0; r < rows_; ++r) {
        for (int j = 0; j < cw; ++j) {
          x.data(0, (static_cast<Eigen::Index>(b) * rows_ + r) * cols_ + t * cw + j) =
              sensor ? s.data(r, static_cast<Eigen::Index>(b) * cw + j)
                     : s.data(0, (static_cast<Eigen::Index>(b) * rows_ + r) * cw + j);
        }
      }
    }
  }
  return x;
}

template <class T>
Tensor<T> ConvLstmBlock<T>::forward(const Tensor<T>& x, const ForwardContext& ctx) {
  batch_ = x.batch;
  std::vector<Tensor<T>> seq = split(x);
  for (auto& cell : cells_) seq = cell.forward(seq, ctx.train);
  return seq.back();
}

template <class T>
Tensor<T> ConvLstmBlock<T>::backward(const Tensor<T>& grad_out) {
  std::vector<Tensor<T>> grads(steps_);
  grads.back() = grad_out;
  for (std::size_t k = cells_.size(); k-- > 0;) grads = cells_[k].backward(grads);
  return merge(grads);
}

template <class T>
std::vector<Param<T>*> ConvLstmBlock<T>::params() {
  std::vector<Param<T>*> out;
  for (auto& cell : cells_) {
    for (Param<T>* p : cell.params()) out.push_back(p);
  }
  return out;
}

template class ConvLstmCell<float>;
template class ConvLstmCell<double>;
template class ConvLstmBlock<float>;
template class ConvLstmBlock<double>;

}  // namespace abcauth::neural
