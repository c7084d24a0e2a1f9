#pragma once

// Tape-based reverse-mode differentiation over Tensor-valued nodes.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "danae/errors.hpp"
#include "danae/nn/conv.hpp"
#include "danae/nn/tensor.hpp"

namespace danae::nn {

/// A convolution with its trainable parameters. Weight gradients live in the
/// tensors' grad slots and accumulate until zero_grad().
struct ConvLayer {
  ConvSpec spec;
  Tensor weight;  // conv: (out x in x k); transposed: (in x out x k)
  Tensor bias;    // (1 x out)

  explicit ConvLayer(const ConvSpec& s = {})
      : spec(s),
        weight(s.transposed ? s.in_channels : s.out_channels, s.transposed ? s.out_channels : s.in_channels,
               s.kernel_size),
        bias(1, s.out_channels) {}

  std::size_t parameter_count() const { return weight.size() + bias.size(); }

  void zero_grad() {
    weight.zero_grad();
    bias.zero_grad();
  }
};

class Tape {
 public:
  using NodeId = std::size_t;

  /// A non-recording tape only evaluates; backward() on it is an error.
  explicit Tape(bool record = true) : record_(record) {}

  bool recording() const { return record_; }

  /// Records a constant/input tensor; its gradient is readable after backward.
  NodeId leaf(Tensor value) { return push(std::move(value), {}); }

  NodeId conv(NodeId x, ConvLayer& layer) {
    return layer.spec.transposed ? conv1d_transposed(x, layer) : conv1d(x, layer);
  }

  NodeId conv1d(NodeId x, ConvLayer& layer) {
    auto cache = record_ ? std::make_shared<RowMat>() : nullptr;
    Tensor y = nn::conv1d(value(x), layer.weight, layer.bias, layer.spec, cache.get());
    const std::size_t batch = value(x).batch(), len = value(x).length();
    return push(std::move(y), [x, &layer, cache, batch, len](Tape& tape, NodeId self) {
      nn::conv1d_backward(*cache, layer.weight, layer.bias, layer.spec, batch, len, tape.nodes_[self].value.grad(),
                          tape.nodes_[x].value.grad());
    });
  }

  NodeId conv1d_transposed(NodeId x, ConvLayer& layer) {
    auto cache = record_ ? std::make_shared<RowMat>() : nullptr;
    Tensor y = nn::conv1d_transposed(value(x), layer.weight, layer.bias, layer.spec, cache.get());
    const std::size_t batch = value(x).batch(), len = value(x).length();
    return push(std::move(y), [x, &layer, cache, batch, len](Tape& tape, NodeId self) {
      nn::conv1d_transposed_backward(*cache, layer.weight, layer.bias, layer.spec, batch, len,
                                     tape.nodes_[self].value.grad(), tape.nodes_[x].value.grad());
    });
  }

  NodeId add(NodeId a, NodeId b) {
    if (!value(a).same_shape(value(b)))
      throw ShapeError("add: shape " + value(a).shape_string() + " vs " + value(b).shape_string());
    Tensor y = value(a);
    y.drop_grad();
    const auto bv = value(b).values();
    auto yv = y.values();
    for (std::size_t i = 0; i < yv.size(); ++i) yv[i] += bv[i];
    return push(std::move(y), [a, b](Tape& tape, NodeId self) {
      const auto g = tape.nodes_[self].value.grad();
      auto ga = tape.nodes_[a].value.grad();
      auto gb = tape.nodes_[b].value.grad();
      for (std::size_t i = 0; i < g.size(); ++i) {
        ga[i] += g[i];
        gb[i] += g[i];
      }
    });
  }

  NodeId activation(NodeId x) {
    Tensor y = nn::activation(value(x));
    return push(std::move(y), [x](Tape& tape, NodeId self) {
      const auto g = tape.nodes_[self].value.grad();
      const auto xv = tape.nodes_[x].value.values();
      auto gx = tape.nodes_[x].value.grad();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += xv[i] > 0.0 ? g[i] : kLeakySlope * g[i];
    });
  }

  /// Scalar node holding the mean-square error against a constant target.
  NodeId l2_loss(NodeId pred, const Tensor& target) {
    Tensor y(1, 1);
    y(0, 0) = nn::l2_loss(value(pred), target);
    auto dpred = record_ ? std::make_shared<std::vector<double>>(nn::l2_loss_grad(value(pred), target)) : nullptr;
    return push(std::move(y), [pred, dpred](Tape& tape, NodeId self) {
      const double g = tape.nodes_[self].value.grad()[0];
      auto gp = tape.nodes_[pred].value.grad();
      for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += g * (*dpred)[i];
    });
  }

  const Tensor& value(NodeId id) const {
    check(id);
    return nodes_[id].value;
  }

  std::span<const double> grad(NodeId id) const {
    check(id);
    if (!backward_done_) throw StateError("gradients requested before backward()");
    return nodes_[id].value.grad();
  }

  /// Propagates d(root)/d(.) to every recorded node and accumulates into the
  /// parameters the tape touched. The root is seeded with ones.
  void backward(NodeId root) {
    if (nodes_.empty()) throw StateError("backward() called on an empty tape; run a forward pass first");
    if (!record_) throw StateError("backward() called on a non-recording tape");
    check(root);
    for (auto& n : nodes_) n.value.zero_grad();
    for (double& g : nodes_[root].value.grad()) g = 1.0;
    for (std::size_t i = root + 1; i-- > 0;)
      if (nodes_[i].back) nodes_[i].back(*this, i);
    backward_done_ = true;
  }

  std::size_t size() const { return nodes_.size(); }

  void clear() {
    nodes_.clear();
    backward_done_ = false;
  }

 private:
  struct Node {
    Tensor value;
    std::function<void(Tape&, NodeId)> back;
  };

  void check(NodeId id) const {
    if (id >= nodes_.size()) throw StateError("node id " + std::to_string(id) + " is not on this tape");
  }

  NodeId push(Tensor value, std::function<void(Tape&, NodeId)> back) {
    if (!record_) back = nullptr;
    nodes_.push_back({std::move(value), std::move(back)});
    backward_done_ = false;
    return nodes_.size() - 1;
  }

  bool record_ = true;
  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace danae::nn
