#pragma once

#include <cstddef>
#include <vector>

#include "danae/errors.hpp"
#include "danae/types.hpp"

namespace danae {

inline constexpr std::size_t kWindowLength = 20;

/// Aligned (estimate, truth) windows of one angle.
struct WindowSet {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> targets;
  AngleId angle = AngleId::roll;

  std::size_t size() const { return inputs.size(); }
  bool empty() const { return inputs.empty(); }
};

inline std::size_t window_count(std::size_t n, std::size_t stride, std::size_t length = kWindowLength) {
  return n < length ? 0 : (n - length) / stride + 1;
}

inline WindowSet make_windows(const AngleSeries& estimates, const AngleSeries& truth, AngleId angle,
                              std::size_t stride = 1, std::size_t length = kWindowLength) {
  if (estimates.size() != truth.size()) throw ShapeError("make_windows: estimate and truth lengths differ");
  if (estimates.size() < length) throw InvalidInputError("make_windows: series shorter than one window");
  if (stride < 1) throw InvalidInputError("make_windows: stride must be >= 1");

  const auto est = estimates.channel(angle);
  const auto gt = truth.channel(angle);
  WindowSet ws;
  ws.angle = angle;
  const std::size_t count = window_count(est.size(), stride, length);
  ws.inputs.reserve(count);
  ws.targets.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    const auto begin = static_cast<std::ptrdiff_t>(w * stride);
    const auto end = begin + static_cast<std::ptrdiff_t>(length);
    ws.inputs.emplace_back(est.begin() + begin, est.begin() + end);
    ws.targets.emplace_back(gt.begin() + begin, gt.begin() + end);
  }
  return ws;
}

}  // namespace danae
