#pragma once

#include <algorithm>
#include <cmath>

#include "danae/errors.hpp"
#include "danae/types.hpp"

namespace danae {

struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
};

/// Intrinsic Z-Y-X Euler angles of a rotation quaternion (normalized first).
inline EulerAngles quat_to_euler(Quaternion q) {
  const double n = q.norm();
  if (!std::isfinite(n) || n == 0.0) throw InvalidInputError("quat_to_euler: zero or non-finite quaternion");
  if (std::abs(n - 1.0) > 1e-6) {
    q.w /= n;
    q.x /= n;
    q.y /= n;
    q.z /= n;
  }
  const double roll = std::atan2(2.0 * (q.w * q.x + q.y * q.z), 1.0 - 2.0 * (q.x * q.x + q.y * q.y));
  const double pitch = std::asin(std::clamp(2.0 * (q.w * q.y - q.z * q.x), -1.0, 1.0));
  const double yaw = std::atan2(2.0 * (q.w * q.z + q.x * q.y), 1.0 - 2.0 * (q.y * q.y + q.z * q.z));
  return {wrap_angle(roll), pitch, wrap_angle(yaw)};
}

}  // namespace danae
