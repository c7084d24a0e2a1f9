#pragma once

// Stride-1 dilated 1D convolution and its transpose, plus the elementwise
// pieces (leaky activation, mean-square loss). Convolutions are lowered to a
// single GEMM over the whole batch via im2col.

#include <Eigen/Core>
#include <cstddef>
#include <sstream>
#include <vector>

#include "danae/errors.hpp"
#include "danae/nn/tensor.hpp"

namespace danae::nn {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ConvSpec {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel_size = 3;
  std::size_t dilation = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;
  bool transposed = false;

  void validate() const {
    if (in_channels == 0 || out_channels == 0) throw ShapeError("ConvSpec: channel counts must be positive");
    if (kernel_size % 2 == 0) throw ShapeError("ConvSpec: kernel_size must be odd");
    if (dilation < 1) throw ShapeError("ConvSpec: dilation must be >= 1");
    if (stride != 1) throw ShapeError("ConvSpec: only stride 1 is supported");
  }

  /// conv: L + 2p - d(k-1); transposed: L - 2p + d(k-1).
  std::size_t output_length(std::size_t input_length) const {
    const auto span = static_cast<long long>(dilation * (kernel_size - 1));
    const auto pad2 = 2 * static_cast<long long>(padding);
    const auto in = static_cast<long long>(input_length);
    const long long out = transposed ? in - pad2 + span : in + pad2 - span;
    if (out < 1) {
      std::ostringstream os;
      os << "convolution output length " << out << " for input length " << input_length << " is not positive";
      throw ShapeError(os.str());
    }
    return static_cast<std::size_t>(out);
  }

  std::size_t weight_count() const { return out_channels * in_channels * kernel_size; }
};

/// Size of the ordinary (non-transposed) convolution both directions share:
/// `long_len` is the conv input length, `short_len` the conv output length.
struct ConvGeometry {
  std::size_t channels;
  std::size_t long_len;
  std::size_t short_len;
  std::size_t kernel;
  std::size_t dilation;
  std::size_t padding;
};

namespace detail {

/// cols(c*k + t, b*short + p) = x(b, c, p - pad + t*d), zero outside.
inline RowMat im2col(std::span<const double> x, std::size_t batch, const ConvGeometry& g) {
  RowMat cols = RowMat::Zero(static_cast<Eigen::Index>(g.channels * g.kernel),
                             static_cast<Eigen::Index>(batch * g.short_len));
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t c = 0; c < g.channels; ++c) {
      const double* src = x.data() + (b * g.channels + c) * g.long_len;
      for (std::size_t t = 0; t < g.kernel; ++t) {
        double* dst = cols.data() + (c * g.kernel + t) * cols.cols() + b * g.short_len;
        const long long shift = static_cast<long long>(t * g.dilation) - static_cast<long long>(g.padding);
        for (std::size_t p = 0; p < g.short_len; ++p) {
          const long long q = static_cast<long long>(p) + shift;
          if (q >= 0 && q < static_cast<long long>(g.long_len)) dst[p] = src[q];
        }
      }
    }
  }
  return cols;
}

/// Adjoint of im2col: out(b, c, p - pad + t*d) += cols(c*k + t, b*short + p).
inline void col2im_add(const RowMat& cols, std::span<double> out, std::size_t batch, const ConvGeometry& g) {
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t c = 0; c < g.channels; ++c) {
      double* dst = out.data() + (b * g.channels + c) * g.long_len;
      for (std::size_t t = 0; t < g.kernel; ++t) {
        const double* src = cols.data() + (c * g.kernel + t) * cols.cols() + b * g.short_len;
        const long long shift = static_cast<long long>(t * g.dilation) - static_cast<long long>(g.padding);
        for (std::size_t p = 0; p < g.short_len; ++p) {
          const long long q = static_cast<long long>(p) + shift;
          if (q >= 0 && q < static_cast<long long>(g.long_len)) dst[q] += src[p];
        }
      }
    }
  }
}

/// (B, C, L) -> (C, B*L)
inline RowMat to_channel_major(std::span<const double> x, std::size_t batch, std::size_t channels, std::size_t length) {
  RowMat m(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(batch * length));
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t c = 0; c < channels; ++c)
      std::copy_n(x.data() + (b * channels + c) * length, length, m.data() + c * batch * length + b * length);
  return m;
}

/// (C, B*L) -> (B, C, L), adding `bias[c]` when given.
inline void from_channel_major(const RowMat& m, std::span<double> out, std::size_t batch, std::size_t channels,
                               std::size_t length, std::span<const double> bias = {}) {
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t c = 0; c < channels; ++c) {
      const double* src = m.data() + c * batch * length + b * length;
      double* dst = out.data() + (b * channels + c) * length;
      const double add = bias.empty() ? 0.0 : bias[c];
      for (std::size_t l = 0; l < length; ++l) dst[l] = src[l] + add;
    }
}

inline void check_params(const Tensor& input, const Tensor& weights, const Tensor& bias, const ConvSpec& spec,
                         bool transposed) {
  spec.validate();
  if (spec.transposed != transposed)
    throw ShapeError(transposed ? "conv1d_transposed called with a non-transposed spec"
                                : "conv1d called with a transposed spec");
  if (input.channels() != spec.in_channels) {
    std::ostringstream os;
    os << "convolution input has " << input.channels() << " channels, spec expects " << spec.in_channels;
    throw ShapeError(os.str());
  }
  if (weights.size() != spec.weight_count()) throw ShapeError("convolution weight count does not match spec");
  if (bias.size() != spec.out_channels) throw ShapeError("convolution bias count does not match spec");
}

inline Eigen::Map<const RowMat> weight_matrix(const Tensor& w, std::size_t rows, std::size_t cols) {
  return {w.values().data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

inline Eigen::Map<RowMat> weight_grad_matrix(Tensor& w, std::size_t rows, std::size_t cols) {
  w.ensure_grad();
  return {w.grad().data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

inline ConvGeometry forward_geometry(const ConvSpec& s, std::size_t in_len) {
  return {s.in_channels, in_len, s.output_length(in_len), s.kernel_size, s.dilation, s.padding};
}

inline ConvGeometry transposed_geometry(const ConvSpec& s, std::size_t in_len) {
  return {s.out_channels, s.output_length(in_len), in_len, s.kernel_size, s.dilation, s.padding};
}

}  // namespace detail

/// Cross-correlation: y(o, p) = b(o) + sum_{i,t} w(o, i, t) x(i, p - pad + t*d).
/// weights are (out x in x k); `cache`, when given, receives the im2col matrix
/// for reuse in the backward pass.
inline Tensor conv1d(const Tensor& input, const Tensor& weights, const Tensor& bias, const ConvSpec& spec,
                     RowMat* cache = nullptr) {
  detail::check_params(input, weights, bias, spec, false);
  const auto g = detail::forward_geometry(spec, input.length());
  RowMat cols = detail::im2col(input.values(), input.batch(), g);
  const RowMat y = detail::weight_matrix(weights, spec.out_channels, spec.in_channels * spec.kernel_size) * cols;
  Tensor out(input.batch(), spec.out_channels, g.short_len);
  detail::from_channel_major(y, out.values(), input.batch(), spec.out_channels, g.short_len, bias.values());
  if (cache) *cache = std::move(cols);
  return out;
}

/// Gradients of conv1d. `cols` is the im2col matrix of the forward input.
/// Accumulates into weights/bias grad slots and into `dinput` if non-empty.
inline void conv1d_backward(const RowMat& cols, Tensor& weights, Tensor& bias, const ConvSpec& spec,
                            std::size_t batch, std::size_t in_len, std::span<const double> dout,
                            std::span<double> dinput) {
  const auto g = detail::forward_geometry(spec, in_len);
  const RowMat dy = detail::to_channel_major(dout, batch, spec.out_channels, g.short_len);
  auto dW = detail::weight_grad_matrix(weights, spec.out_channels, spec.in_channels * spec.kernel_size);
  dW.noalias() += dy * cols.transpose();
  bias.ensure_grad();
  Eigen::Map<Eigen::VectorXd>(bias.grad().data(), static_cast<Eigen::Index>(spec.out_channels)) +=
      dy.rowwise().sum();
  if (!dinput.empty()) {
    const RowMat dcols =
        detail::weight_matrix(weights, spec.out_channels, spec.in_channels * spec.kernel_size).transpose() * dy;
    detail::col2im_add(dcols, dinput, batch, g);
  }
}

/// Adjoint of conv1d in its input: weights are (in x out x k), i.e. the same
/// array a conv1d from `out` to `in` channels would use.
inline Tensor conv1d_transposed(const Tensor& input, const Tensor& weights, const Tensor& bias, const ConvSpec& spec,
                                RowMat* cache = nullptr) {
  detail::check_params(input, weights, bias, spec, true);
  const auto g = detail::transposed_geometry(spec, input.length());
  RowMat x = detail::to_channel_major(input.values(), input.batch(), spec.in_channels, input.length());
  const RowMat cols =
      detail::weight_matrix(weights, spec.in_channels, spec.out_channels * spec.kernel_size).transpose() * x;
  Tensor out(input.batch(), spec.out_channels, g.long_len);
  detail::col2im_add(cols, out.values(), input.batch(), g);
  for (std::size_t b = 0; b < out.batch(); ++b)
    for (std::size_t o = 0; o < spec.out_channels; ++o)
      for (std::size_t l = 0; l < g.long_len; ++l) out(b, o, l) += bias.values()[o];
  if (cache) *cache = std::move(x);
  return out;
}

/// Gradients of conv1d_transposed. `x` is the channel-major forward input.
inline void conv1d_transposed_backward(const RowMat& x, Tensor& weights, Tensor& bias, const ConvSpec& spec,
                                       std::size_t batch, std::size_t in_len, std::span<const double> dout,
                                       std::span<double> dinput) {
  const auto g = detail::transposed_geometry(spec, in_len);
  const RowMat dcols = detail::im2col(dout, batch, g);
  auto dW = detail::weight_grad_matrix(weights, spec.in_channels, spec.out_channels * spec.kernel_size);
  dW.noalias() += x * dcols.transpose();
  bias.ensure_grad();
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t o = 0; o < spec.out_channels; ++o) {
      const double* src = dout.data() + (b * spec.out_channels + o) * g.long_len;
      double s = 0.0;
      for (std::size_t l = 0; l < g.long_len; ++l) s += src[l];
      bias.grad()[o] += s;
    }
  if (!dinput.empty()) {
    const RowMat dx =
        detail::weight_matrix(weights, spec.in_channels, spec.out_channels * spec.kernel_size) * dcols;
    std::vector<double> buf(dinput.size(), 0.0);
    detail::from_channel_major(dx, buf, batch, spec.in_channels, in_len);
    for (std::size_t i = 0; i < buf.size(); ++i) dinput[i] += buf[i];
  }
}

inline constexpr double kLeakySlope = 0.01;

/// Leaky rectifier, slope 0.01 below zero.
inline Tensor activation(const Tensor& x) {
  Tensor y = x;
  y.drop_grad();
  for (double& v : y.values())
    if (!(v > 0.0)) v *= kLeakySlope;
  return y;
}

/// Mean over all elements of (pred - target)^2.
inline double l2_loss(const Tensor& pred, const Tensor& target) {
  if (!pred.same_shape(target))
    throw ShapeError("l2_loss: shape " + pred.shape_string() + " vs " + target.shape_string());
  const auto p = pred.values();
  const auto t = target.values();
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - t[i]) * (p[i] - t[i]);
  return s / static_cast<double>(p.size());
}

/// d l2_loss / d pred = 2 (pred - target) / N.
inline std::vector<double> l2_loss_grad(const Tensor& pred, const Tensor& target) {
  if (!pred.same_shape(target)) throw ShapeError("l2_loss_grad: shape mismatch");
  const auto p = pred.values();
  const auto t = target.values();
  std::vector<double> g(p.size());
  const double scale = 2.0 / static_cast<double>(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) g[i] = scale * (p[i] - t[i]);
  return g;
}

}  // namespace danae::nn
