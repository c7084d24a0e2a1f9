#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "danae/errors.hpp"

namespace danae {

using Vec3 = Eigen::Vector3d;

/// One timestamped reading. gyro in rad/s, accel in m/s^2 (specific force),
/// mag normalized; all body frame.
struct ImuSample {
  double t = 0.0;
  Vec3 gyro = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
  Vec3 mag = Vec3::Zero();
};

/// Roll, pitch, yaw in radians, intrinsic Z-Y-X convention.
struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  double operator[](std::size_t i) const { return i == 0 ? roll : (i == 1 ? pitch : yaw); }
  double& operator[](std::size_t i) { return i == 0 ? roll : (i == 1 ? pitch : yaw); }
  bool finite() const { return std::isfinite(roll) && std::isfinite(pitch) && std::isfinite(yaw); }
};

enum class AngleId { roll = 0, pitch = 1, yaw = 2 };

inline constexpr std::array<AngleId, 3> kAllAngles{AngleId::roll, AngleId::pitch, AngleId::yaw};

inline std::size_t index_of(AngleId a) { return static_cast<std::size_t>(a); }

inline std::string_view angle_name(AngleId a) {
  switch (a) {
    case AngleId::roll:
      return "roll";
    case AngleId::pitch:
      return "pitch";
    case AngleId::yaw:
      return "yaw";
  }
  return "?";
}

inline AngleId parse_angle(std::string_view name) {
  if (name == "roll") return AngleId::roll;
  if (name == "pitch") return AngleId::pitch;
  if (name == "yaw") return AngleId::yaw;
  throw InvalidInputError("unknown angle '" + std::string(name) + "' (expected roll|pitch|yaw)");
}

/// Maps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double w = std::remainder(a, kTwoPi);
  if (w <= -std::numbers::pi) w += kTwoPi;
  return w;
}

enum class SourceKind { oxiod, ucs, synthetic };

inline std::string_view source_name(SourceKind s) {
  switch (s) {
    case SourceKind::oxiod:
      return "oxiod";
    case SourceKind::ucs:
      return "ucs";
    case SourceKind::synthetic:
      return "synthetic";
  }
  return "?";
}

inline SourceKind parse_source(std::string_view name) {
  if (name == "oxiod") return SourceKind::oxiod;
  if (name == "ucs") return SourceKind::ucs;
  if (name == "synthetic") return SourceKind::synthetic;
  throw InvalidInputError("unknown dataset '" + std::string(name) + "' (expected oxiod|ucs|synthetic)");
}

struct ImuSeries {
  std::vector<ImuSample> samples;
  SourceKind source = SourceKind::synthetic;

  std::size_t size() const { return samples.size(); }

  ImuSeries slice(std::size_t begin, std::size_t end) const {
    return {{samples.begin() + static_cast<std::ptrdiff_t>(begin),
             samples.begin() + static_cast<std::ptrdiff_t>(end)},
            source};
  }
};

struct AngleSeries {
  std::vector<double> t;
  std::vector<EulerAngles> angles;

  std::size_t size() const { return t.size(); }

  void push_back(double time, const EulerAngles& a) {
    t.push_back(time);
    angles.push_back(a);
  }

  std::vector<double> channel(AngleId id) const {
    std::vector<double> out(angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i) out[i] = angles[i][index_of(id)];
    return out;
  }

  void set_channel(AngleId id, const std::vector<double>& values) {
    if (values.size() != angles.size()) throw ShapeError("channel length does not match series length");
    for (std::size_t i = 0; i < angles.size(); ++i) angles[i][index_of(id)] = values[i];
  }

  AngleSeries slice(std::size_t begin, std::size_t end) const {
    AngleSeries s;
    s.t.assign(t.begin() + static_cast<std::ptrdiff_t>(begin), t.begin() + static_cast<std::ptrdiff_t>(end));
    s.angles.assign(angles.begin() + static_cast<std::ptrdiff_t>(begin),
                    angles.begin() + static_cast<std::ptrdiff_t>(end));
    return s;
  }
};

}  // namespace danae
