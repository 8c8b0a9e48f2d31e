#include "abcauth/neural/models.hpp"

#include <algorithm>
#include <numeric>

#include "abcauth/common/error.hpp"
#include "json.hpp"

namespace abcauth::neural {

std::string_view to_string(ModelKind kind) { return kind == ModelKind::kCnn ? "cnn" : "convlstm"; }

std::string_view to_string(SequenceLayout layout) {
  return layout == SequenceLayout::kSensorChannels ? "sensor_channels" : "spatial_maps";
}

ModelSpec ModelSpec::cnn(int classes) {
  ModelSpec s;
  s.kind = ModelKind::kCnn;
  s.classes = classes;
  return s;
}

ModelSpec ModelSpec::convlstm(int classes) {
  ModelSpec s;
  s.kind = ModelKind::kConvLstm;
  s.classes = classes;
  s.dropout = 0.0;
  return s;
}

std::string ModelSpec::descriptor() const {
  nlohmann::ordered_json j;
  j["model"] = to_string(kind);
  j["input"] = {1, input_rows, input_cols};
  j["classes"] = classes;
  if (kind == ModelKind::kCnn) {
    j["conv_widths"] = conv_widths;
    j["conv_kernel"] = conv_kernel;
  } else {
    j["cell_widths"] = cell_widths;
    j["cell_kernel"] = cell_kernel;
    j["steps"] = steps;
    j["layout"] = to_string(layout);
  }
  j["dense_widths"] = dense_widths;
  j["dropout"] = dropout;
  j["init_seed"] = init_seed;
  j["flatten_order"] = "position_major";
  return j.dump();
}

ModelSpec ModelSpec::from_descriptor(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ModelSpec s;
    const std::string model = j.at("model").get<std::string>();
    if (model == "cnn") {
      s.kind = ModelKind::kCnn;
      s.conv_widths = j.at("conv_widths").get<std::vector<int>>();
      s.conv_kernel = j.at("conv_kernel").get<int>();
    } else if (model == "convlstm") {
      s.kind = ModelKind::kConvLstm;
      s.cell_widths = j.at("cell_widths").get<std::vector<int>>();
      s.cell_kernel = j.at("cell_kernel").get<int>();
      s.steps = j.at("steps").get<int>();
      const std::string layout = j.at("layout").get<std::string>();
      if (layout == "sensor_channels") {
        s.layout = SequenceLayout::kSensorChannels;
      } else if (layout == "spatial_maps") {
        s.layout = SequenceLayout::kSpatialMaps;
      } else {
        fail(ErrorCode::kFormatVersionMismatch, "unknown sequence layout '" + layout + "'");
      }
    } else {
      fail(ErrorCode::kFormatVersionMismatch, "unknown model kind '" + model + "'");
    }
    const auto input = j.at("input").get<std::vector<int>>();
    if (input.size() != 3 || input[0] != 1) fail(ErrorCode::kFormatVersionMismatch, "bad input shape in descriptor");
    s.input_rows = input[1];
    s.input_cols = input[2];
    s.classes = j.at("classes").get<int>();
    s.dense_widths = j.at("dense_widths").get<std::vector<int>>();
    s.dropout = j.at("dropout").get<double>();
    s.init_seed = j.at("init_seed").get<std::uint64_t>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormatVersionMismatch, std::string("bad model descriptor: ") + e.what());
  }
}

template <class T>
Network<T>::Network(ModelSpec spec) : spec_(std::move(spec)) {
  if (spec_.classes < 1) fail(ErrorCode::kConfigInvalid, "model needs at least one class");
  if (spec_.dense_widths.empty()) fail(ErrorCode::kConfigInvalid, "model needs a hidden dense layer");
  mathcore::RandomStream rng = mathcore::RandomStream(spec_.init_seed).derive(std::string(to_string(spec_.kind)));
  int flat = 0;
  if (spec_.kind == ModelKind::kCnn) {
    int c = 1, h = spec_.input_rows, w = spec_.input_cols;
    for (int width : spec_.conv_widths) {
      layers_.push_back(std::make_unique<Conv2d<T>>(c, width, spec_.conv_kernel, spec_.conv_kernel, rng));
      layers_.push_back(std::make_unique<Relu<T>>());
      layers_.push_back(std::make_unique<MaxPool2d<T>>(2));
      c = width;
      h = MaxPool2d<T>::pooled(h, 2);
      w = MaxPool2d<T>::pooled(w, 2);
    }
    flat = c * h * w;
  } else {
    auto block = std::make_unique<ConvLstmBlock<T>>(spec_.input_rows, spec_.input_cols, spec_.steps, spec_.layout,
                                                    spec_.cell_widths, spec_.cell_kernel, rng);
    flat = block->output_channels() * block->output_height() * block->output_width();
    layers_.push_back(std::move(block));
  }
  layers_.push_back(std::make_unique<Flatten<T>>());
  int in = flat;
  for (int width : spec_.dense_widths) {
    layers_.push_back(std::make_unique<Dense<T>>(in, width, rng));
    layers_.push_back(std::make_unique<Relu<T>>());
    embedding_layer_ = layers_.size() - 1;
    if (spec_.dropout > 0) layers_.push_back(std::make_unique<Dropout<T>>(spec_.dropout));
    in = width;
  }
  layers_.push_back(std::make_unique<Dense<T>>(in, spec_.classes, rng));
}

template <class T>
Tensor<T> Network<T>::forward(const Tensor<T>& x, const ForwardContext& ctx) {
  if (x.channels != 1 || x.height != spec_.input_rows || x.width != spec_.input_cols) {
    fail(ErrorCode::kShapeMismatch, "network input must be 1 x " + std::to_string(spec_.input_rows) + " x " +
                                        std::to_string(spec_.input_cols));
  }
  Tensor<T> a = x;
  for (auto& layer : layers_) a = layer->forward(a, ctx);
  return a;
}

template <class T>
void Network<T>::backward(const Tensor<T>& grad_logits) {
  Tensor<T> g = grad_logits;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    // The input gradient of the first layer is never needed.
    if (k == 0) {
      if (layers_[0]->params().empty()) break;
    }
    g = layers_[k]->backward(g);
  }
}

template <class T>
Tensor<T> Network<T>::embed(const Tensor<T>& x) {
  if (x.channels != 1 || x.height != spec_.input_rows || x.width != spec_.input_cols) {
    fail(ErrorCode::kShapeMismatch, "network input has the wrong shape");
  }
  ForwardContext ctx;
  Tensor<T> a = x;
  for (std::size_t k = 0; k <= embedding_layer_; ++k) a = layers_[k]->forward(a, ctx);
  return a;
}

template <class T>
std::vector<Param<T>*> Network<T>::params() {
  std::vector<Param<T>*> out;
  for (auto& layer : layers_) {
    for (Param<T>* p : layer->params()) out.push_back(p);
  }
  return out;
}

template <class T>
void Network<T>::zero_grad() {
  for (Param<T>* p : params()) p->zero_grad();
}

template <class T>
std::size_t Network<T>::parameter_count() {
  std::size_t n = 0;
  for (Param<T>* p : params()) n += static_cast<std::size_t>(p->value.size());
  return n;
}

template <class T>
std::vector<std::vector<int>> Network<T>::shape_trace(const Tensor<T>& x) {
  std::vector<std::vector<int>> out;
  ForwardContext ctx;
  Tensor<T> a = x;
  for (auto& layer : layers_) {
    a = layer->forward(a, ctx);
    out.push_back(a.shape());
  }
  return out;
}

template <class T>
Tensor<T> to_batch(const std::vector<motion::MotionSample>& samples, const std::vector<std::size_t>& index) {
  if (index.empty()) fail(ErrorCode::kShapeMismatch, "empty batch");
  const int rows = static_cast<int>(samples[index[0]].values().rows());
  const int cols = static_cast<int>(samples[index[0]].values().cols());
  Tensor<T> x(static_cast<int>(index.size()), 1, rows, cols);
  for (std::size_t b = 0; b < index.size(); ++b) {
    const Eigen::MatrixXd& v = samples.at(index[b]).values();
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        x.data(0, (static_cast<Eigen::Index>(b) * rows + r) * cols + c) = static_cast<T>(v(r, c));
      }
    }
  }
  return x;
}

template <class T>
Tensor<T> to_batch(const std::vector<motion::MotionSample>& samples) {
  std::vector<std::size_t> index(samples.size());
  std::iota(index.begin(), index.end(), 0);
  return to_batch<T>(samples, index);
}

template <class T>
Prediction predict(Network<T>& net, const Tensor<T>& x, const ForwardContext& ctx) {
  const Tensor<T> logits = net.forward(x, ctx);
  return {softmax<T>(logits.data).template cast<double>()};
}

Eigen::MatrixXd extract_features(Network<float>& net, const std::vector<motion::MotionSample>& samples) {
  constexpr std::size_t kChunk = 64;
  Eigen::MatrixXd out;
  for (std::size_t start = 0; start < samples.size(); start += kChunk) {
    std::vector<std::size_t> idx;
    for (std::size_t i = start; i < std::min(samples.size(), start + kChunk); ++i) idx.push_back(i);
    const Tensor<float> f = net.embed(to_batch<float>(samples, idx));
    if (out.size() == 0) out.resize(static_cast<Eigen::Index>(samples.size()), f.channels);
    out.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(idx.size())) =
        f.data.transpose().cast<double>();
  }
  return out;
}

Eigen::MatrixXd extract_embeddings(Network<float>& cnn, Network<float>& convlstm,
                                   const std::vector<motion::MotionSample>& samples) {
  const Eigen::MatrixXd a = extract_features(cnn, samples);
  const Eigen::MatrixXd b = extract_features(convlstm, samples);
  Eigen::MatrixXd out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

Eigen::VectorXd extract_embedding(Network<float>& cnn, Network<float>& convlstm, const motion::MotionSample& sample) {
  return extract_embeddings(cnn, convlstm, {sample}).row(0).transpose();
}

template class Network<float>;
template class Network<double>;
template Tensor<float> to_batch<float>(const std::vector<motion::MotionSample>&, const std::vector<std::size_t>&);
template Tensor<double> to_batch<double>(const std::vector<motion::MotionSample>&, const std::vector<std::size_t>&);
template Tensor<float> to_batch<float>(const std::vector<motion::MotionSample>&);
template Tensor<double> to_batch<double>(const std::vector<motion::MotionSample>&);
template Prediction predict<float>(Network<float>&, const Tensor<float>&, const ForwardContext&);
template Prediction predict<double>(Network<double>&, const Tensor<double>&, const ForwardContext&);

}  // namespace abcauth::neural
