#pragma once

// Dilated-convolution denoising autoencoder over length-20 windows of one
// Euler angle.
//
//   encoder:  e1..e4 = act(conv_d(e_{i-1})), d = 1, 2, 4, 8; e0 = input
//   decoder:  std1 -> up1 -> std2 -> up2 -> std3 -> up3 -> std4
//             std_i consumes e_i + s_i, with s_1 = e4 (the hidden code) and
//             s_i = output of up_{i-1}; up dilations 4, 2, 1
//
// Every layer has kernel 3 and padding = dilation, so all stages keep the
// window length. std4 maps to one channel with no activation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "danae/dataio/windows.hpp"
#include "danae/errors.hpp"
#include "danae/nn/adam.hpp"
#include "danae/nn/autodiff.hpp"
#include "danae/nn/checkpoint.hpp"
#include "danae/types.hpp"

namespace danae {

using nn::ConvLayer;
using nn::ConvSpec;
using nn::Tape;
using nn::Tensor;

inline constexpr std::size_t kDefaultWidth = 128;
inline constexpr std::array<std::size_t, 4> kEncoderDilations{1, 2, 4, 8};
inline constexpr std::array<std::size_t, 3> kDecoderUpDilations{4, 2, 1};

class DanaeModel {
 public:
  explicit DanaeModel(std::size_t width = kDefaultWidth, std::size_t window_length = kWindowLength)
      : width_(width), window_length_(window_length) {
    if (width == 0) throw ConfigError("model width must be positive");
    for (std::size_t i = 0; i < 4; ++i)
      encoder[i] = ConvLayer(spec(i == 0 ? 1 : width, width, kEncoderDilations[i], false));
    for (std::size_t i = 0; i < 3; ++i) decoder_up[i] = ConvLayer(spec(width, width, kDecoderUpDilations[i], true));
    for (std::size_t i = 0; i < 4; ++i) decoder_std[i] = ConvLayer(spec(width, i == 3 ? 1 : width, 1, false));
  }

  std::size_t width() const { return width_; }
  std::size_t window_length() const { return window_length_; }

  std::array<ConvLayer, 4> encoder;
  std::array<ConvLayer, 3> decoder_up;
  std::array<ConvLayer, 4> decoder_std;

  /// Canonical layer order: encoder, decoder_up, decoder_std.
  std::vector<ConvLayer*> layers() {
    std::vector<ConvLayer*> out;
    for (auto& l : encoder) out.push_back(&l);
    for (auto& l : decoder_up) out.push_back(&l);
    for (auto& l : decoder_std) out.push_back(&l);
    return out;
  }

  std::vector<const ConvLayer*> layers() const {
    std::vector<const ConvLayer*> out;
    for (const auto* l : const_cast<DanaeModel*>(this)->layers()) out.push_back(l);
    return out;
  }

  std::vector<Tensor*> parameters() {
    std::vector<Tensor*> out;
    for (auto* l : layers()) {
      out.push_back(&l->weight);
      out.push_back(&l->bias);
    }
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto* l : layers()) n += l->parameter_count();
    return n;
  }

  void zero_grad() {
    for (auto* l : layers()) l->zero_grad();
  }

  /// Records the network on `tape`. Input is (B x 1 x window_length).
  Tape::NodeId forward(Tape& tape, Tape::NodeId input) {
    const Tensor& x = tape.value(input);
    if (x.channels() != 1 || x.length() != window_length_)
      throw ShapeError("DANAE input must be (B x 1 x " + std::to_string(window_length_) + "), got " +
                       x.shape_string());
    std::array<Tape::NodeId, 4> enc{};
    Tape::NodeId h = input;
    for (std::size_t i = 0; i < 4; ++i) {
      h = tape.activation(tape.conv(h, encoder[i]));
      enc[i] = h;
    }
    Tape::NodeId stage = enc[3];
    for (std::size_t i = 0; i < 4; ++i) {
      const Tape::NodeId mixed = tape.conv(tape.add(enc[i], stage), decoder_std[i]);
      if (i == 3) return mixed;
      stage = tape.activation(tape.conv(tape.activation(mixed), decoder_up[i]));
    }
    return stage;  // unreachable
  }

  /// Pure evaluation of a batch of windows.
  Tensor forward(const Tensor& windows) const {
    Tape tape(false);
    // A non-recording tape keeps no reference to the layers past this call.
    auto& self = const_cast<DanaeModel&>(*this);
    return tape.value(self.forward(tape, tape.leaf(windows)));
  }

  nn::Checkpoint to_checkpoint() const {
    nn::Checkpoint ck;
    ck.window_length = window_length_;
    const auto ls = layers();
    for (std::size_t i = 0; i < ls.size(); ++i) ck.layers.push_back({layer_name(i), *ls[i]});
    for (auto& nl : ck.layers) {
      nl.layer.weight.drop_grad();
      nl.layer.bias.drop_grad();
    }
    return ck;
  }

  static DanaeModel from_checkpoint(const nn::Checkpoint& ck) {
    if (ck.layers.size() != 11) throw ParseError("checkpoint does not hold an 11-layer DANAE model");
    DanaeModel m(ck.layers.front().layer.spec.out_channels, ck.window_length);
    const auto ls = m.layers();
    for (std::size_t i = 0; i < ls.size(); ++i) {
      const auto& src = ck.layers[i];
      const auto& a = src.layer.spec;
      const auto& b = ls[i]->spec;
      if (src.name != layer_name(i) || a.in_channels != b.in_channels || a.out_channels != b.out_channels ||
          a.kernel_size != b.kernel_size || a.dilation != b.dilation || a.padding != b.padding ||
          a.transposed != b.transposed)
        throw ParseError("checkpoint layer '" + src.name + "' does not match the DANAE architecture");
      ls[i]->weight = src.layer.weight;
      ls[i]->bias = src.layer.bias;
    }
    return m;
  }

  void save(const std::string& path) const { nn::save_checkpoint(path, to_checkpoint()); }
  static DanaeModel load(const std::string& path) { return from_checkpoint(nn::load_checkpoint(path)); }

  static std::string layer_name(std::size_t i) {
    if (i < 4) return "enc" + std::to_string(i);
    if (i < 7) return "up" + std::to_string(i - 4);
    return "std" + std::to_string(i - 7);
  }

 private:
  static ConvSpec spec(std::size_t in, std::size_t out, std::size_t dilation, bool transposed) {
    ConvSpec s;
    s.in_channels = in;
    s.out_channels = out;
    s.kernel_size = 3;
    s.dilation = dilation;
    s.padding = dilation;
    s.transposed = transposed;
    return s;
  }

  std::size_t width_;
  std::size_t window_length_;
};

/// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)) with fan_in = in_channels * k;
/// biases zero.
inline DanaeModel build_model(std::uint64_t seed, std::size_t width = kDefaultWidth) {
  DanaeModel m(width);
  std::mt19937_64 rng(seed);
  for (auto* l : m.layers()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l->spec.in_channels * l->spec.kernel_size));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& w : l->weight.values()) w = dist(rng);
    std::fill(l->bias.values().begin(), l->bias.values().end(), 0.0);
  }
  return m;
}

struct TrainConfig {
  std::size_t window_length = kWindowLength;
  std::size_t batch_size = 16;
  double lr = 0.002;
  std::size_t epochs = 1;
  std::uint64_t seed = 0;
  bool shuffle = true;

  void validate() const {
    if (window_length != kWindowLength) throw ConfigError("the shipped architecture uses window_length 20");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be a finite non-negative number");
  }
};

namespace detail {

inline Tensor stack_windows(const std::vector<std::vector<double>>& src, std::span<const std::size_t> idx,
                            std::size_t length) {
  Tensor t(idx.size(), 1, length);
  for (std::size_t b = 0; b < idx.size(); ++b) {
    const auto& w = src[idx[b]];
    if (w.size() != length) throw ShapeError("window length differs from the model window length");
    std::copy(w.begin(), w.end(), t.values().begin() + static_cast<std::ptrdiff_t>(b * length));
  }
  return t;
}

}  // namespace detail

using EpochCallback = std::function<void(std::size_t epoch, double mean_loss)>;

/// Minimizes the mean-square reconstruction error of ground-truth windows
/// from filter-estimate windows with Adam. Returns the mean loss per epoch.
inline std::vector<double> train(DanaeModel& model, const WindowSet& windows, const TrainConfig& cfg,
                                 const EpochCallback& on_epoch = {}) {
  cfg.validate();
  if (windows.empty()) throw InvalidInputError("train: empty window set");
  if (windows.inputs.size() != windows.targets.size()) throw ShapeError("train: inputs/targets count mismatch");

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  nn::AdamState adam;
  adam.lr = cfg.lr;
  auto params = model.parameters();

  std::vector<double> history;
  history.reserve(cfg.epochs);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, end - start);
      Tape tape;
      const auto in = tape.leaf(detail::stack_windows(windows.inputs, batch, cfg.window_length));
      const auto out = model.forward(tape, in);
      const auto loss = tape.l2_loss(out, detail::stack_windows(windows.targets, batch, cfg.window_length));
      model.zero_grad();
      tape.backward(loss);
      nn::adam_step(params, adam);
      loss_sum += tape.value(loss)(0, 0) * static_cast<double>(batch.size());
    }
    history.push_back(loss_sum / static_cast<double>(order.size()));
    if (on_epoch) on_epoch(epoch, history.back());
  }
  return history;
}

/// Sliding stride-1 windows; each output sample is the mean of every window
/// reconstruction covering it.
inline std::vector<double> denoise_series(const DanaeModel& model, std::span<const double> series,
                                          std::size_t chunk = 256) {
  const std::size_t L = model.window_length();
  if (series.size() < L)
    throw InvalidInputError("denoise_series: series has " + std::to_string(series.size()) + " samples, needs >= " +
                            std::to_string(L));
  const std::size_t count = series.size() - L + 1;
  std::vector<double> sum(series.size(), 0.0);
  std::vector<double> cover(series.size(), 0.0);
  for (std::size_t first = 0; first < count; first += chunk) {
    const std::size_t n = std::min(chunk, count - first);
    Tensor batch(n, 1, L);
    for (std::size_t b = 0; b < n; ++b)
      std::copy_n(series.begin() + static_cast<std::ptrdiff_t>(first + b), L,
                  batch.values().begin() + static_cast<std::ptrdiff_t>(b * L));
    const Tensor out = model.forward(batch);
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t l = 0; l < L; ++l) {
        sum[first + b + l] += out(b, 0, l);
        cover[first + b + l] += 1.0;
      }
  }
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] /= cover[i];
  return sum;
}

/// Replaces one angle channel of `series` with its denoised version.
inline AngleSeries denoise_series(const DanaeModel& model, const AngleSeries& series, AngleId angle) {
  AngleSeries out = series;
  const auto ch = series.channel(angle);
  out.set_channel(angle, denoise_series(model, ch));
  return out;
}

}  // namespace danae
