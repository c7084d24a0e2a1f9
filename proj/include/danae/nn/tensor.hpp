#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "danae/errors.hpp"

namespace danae::nn {

/// Dense (batch x channels x length) array of doubles, row-major, with an
/// optional gradient buffer of the same shape. A single signal is batch 1.
/// Convolution weights reuse the layout as (out x in x kernel).
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t channels, std::size_t length) : Tensor(1, channels, length) {}
  Tensor(std::size_t batch, std::size_t channels, std::size_t length, double fill = 0.0)
      : batch_(batch), channels_(channels), length_(length), values_(batch * channels * length, fill) {}

  static Tensor row(std::initializer_list<double> v) {
    Tensor t(1, v.size());
    std::copy(v.begin(), v.end(), t.values_.begin());
    return t;
  }

  static Tensor from(std::size_t batch, std::size_t channels, std::size_t length, std::vector<double> values) {
    if (values.size() != batch * channels * length) throw ShapeError("Tensor::from: value count does not match shape");
    Tensor t;
    t.batch_ = batch;
    t.channels_ = channels;
    t.length_ = length;
    t.values_ = std::move(values);
    return t;
  }

  std::size_t batch() const { return batch_; }
  std::size_t channels() const { return channels_; }
  std::size_t length() const { return length_; }
  std::size_t size() const { return values_.size(); }

  bool same_shape(const Tensor& o) const {
    return batch_ == o.batch_ && channels_ == o.channels_ && length_ == o.length_;
  }

  std::string shape_string() const {
    std::ostringstream os;
    os << "(" << batch_ << "x" << channels_ << "x" << length_ << ")";
    return os.str();
  }

  std::size_t offset(std::size_t b, std::size_t c, std::size_t l) const { return (b * channels_ + c) * length_ + l; }

  double& operator()(std::size_t c, std::size_t l) { return values_[offset(0, c, l)]; }
  double operator()(std::size_t c, std::size_t l) const { return values_[offset(0, c, l)]; }
  double& operator()(std::size_t b, std::size_t c, std::size_t l) { return values_[offset(b, c, l)]; }
  double operator()(std::size_t b, std::size_t c, std::size_t l) const { return values_[offset(b, c, l)]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& data() { return values_; }
  const std::vector<double>& data() const { return values_; }

  bool has_grad() const { return !grad_.empty(); }
  void ensure_grad() {
    if (grad_.size() != values_.size()) grad_.assign(values_.size(), 0.0);
  }
  void zero_grad() {
    ensure_grad();
    std::fill(grad_.begin(), grad_.end(), 0.0);
  }
  void drop_grad() { grad_.clear(); }
  std::span<double> grad() { return grad_; }
  std::span<const double> grad() const { return grad_; }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

 private:
  std::size_t batch_ = 0;
  std::size_t channels_ = 0;
  std::size_t length_ = 0;
  std::vector<double> values_;
  std::vector<double> grad_;
};

}  // namespace danae::nn
