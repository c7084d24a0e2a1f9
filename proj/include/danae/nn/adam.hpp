#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "danae/errors.hpp"
#include "danae/nn/tensor.hpp"

namespace danae::nn {

struct AdamState {
  double lr = 0.002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t step_count = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

/// One bias-corrected Adam update of every parameter from its grad slot.
/// Moment buffers are allocated on the first call.
inline void adam_step(std::span<Tensor* const> params, AdamState& state) {
  if (state.m.empty()) {
    for (const Tensor* p : params) {
      state.m.emplace_back(p->size(), 0.0);
      state.v.emplace_back(p->size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) throw ShapeError("adam_step: parameter list changed between steps");

  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);

  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k];
    if (state.m[k].size() != p.size()) throw ShapeError("adam_step: parameter shape changed between steps");
    p.ensure_grad();
    auto w = p.values();
    const auto g = p.grad();
    auto& m = state.m[k];
    auto& v = state.v[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      w[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

}  // namespace danae::nn
