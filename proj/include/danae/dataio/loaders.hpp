#pragma once

// Dataset loaders. Column schemas (header line optional):
//
// OxIOD-style IMU (16 columns):
//   time, attitude_roll, attitude_pitch, attitude_yaw,
//   rotation_rate_x, rotation_rate_y, rotation_rate_z,   rad/s
//   gravity_x, gravity_y, gravity_z,                      g
//   user_acc_x, user_acc_y, user_acc_z,                   g
//   magnetic_x, magnetic_y, magnetic_z                    any unit
// Accelerations follow the phone convention (gravity reads -1 g on z when
// lying face up), so specific force = -(gravity + user_acc) * 9.80665.
// The attitude_* columns are the phone's own estimate and are ignored.
//
// OxIOD-style Vicon (8 columns):
//   time, translation_x, translation_y, translation_z,
//   rotation_w, rotation_x, rotation_y, rotation_z
//
// UCS-style AHRS log (13 columns):
//   time, gyro_x, gyro_y, gyro_z, accel_x, accel_y, accel_z,
//   mag_x, mag_y, mag_z, roll, pitch, yaw                (rad/s, m/s^2, -, rad)
//
// Magnetometer vectors are normalized to unit length on load.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "danae/dataio/csv.hpp"
#include "danae/dataio/quaternion.hpp"
#include "danae/errors.hpp"
#include "danae/types.hpp"

namespace danae {

inline constexpr double kStandardGravity = 9.80665;

struct Dataset {
  ImuSeries imu;
  AngleSeries truth;
  // Per-angle trust in the ground truth (UCS yaw is not trustworthy).
  std::array<bool, 3> truth_reliable{true, true, true};
};

namespace detail {

inline Vec3 normalized_mag(const Vec3& m) {
  const double n = m.norm();
  return n > 0.0 ? Vec3(m / n) : m;
}

inline void require_columns(const CsvTable& t, std::size_t n, const std::string& what, const std::string& path) {
  if (t.columns != n)
    throw SchemaError("'" + path + "': " + what + " needs " + std::to_string(n) + " columns, found " +
                      std::to_string(t.columns));
}

inline void require_length(const ImuSeries& s, const std::string& path) {
  if (s.size() < 2) throw DataError("'" + path + "': a series needs at least 2 samples");
}

/// Index of the reference time nearest to each query time (both ascending).
inline std::vector<std::size_t> nearest_indices(const std::vector<double>& query, const std::vector<double>& ref) {
  std::vector<std::size_t> out(query.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < query.size(); ++i) {
    while (j + 1 < ref.size() && std::abs(ref[j + 1] - query[i]) <= std::abs(ref[j] - query[i])) ++j;
    out[i] = j;
  }
  return out;
}

}  // namespace detail

inline Dataset load_oxiod(const std::string& imu_path, const std::string& vicon_path) {
  const auto imu = read_csv(imu_path);
  detail::require_columns(imu, 16, "OxIOD IMU file", imu_path);

  Dataset ds;
  ds.imu.source = SourceKind::oxiod;
  std::vector<double> t;
  for (const auto& r : imu.rows) {
    ImuSample s;
    s.t = r[0];
    s.gyro = {r[4], r[5], r[6]};
    s.accel = -kStandardGravity * Vec3(r[7] + r[10], r[8] + r[11], r[9] + r[12]);
    s.mag = detail::normalized_mag({r[13], r[14], r[15]});
    ds.imu.samples.push_back(s);
    t.push_back(s.t);
  }
  require_increasing(t, imu.lines, imu_path);
  detail::require_length(ds.imu, imu_path);

  const auto vicon = read_csv(vicon_path);
  detail::require_columns(vicon, 8, "OxIOD Vicon file", vicon_path);
  std::vector<double> vt;
  std::vector<EulerAngles> va;
  for (const auto& r : vicon.rows) {
    vt.push_back(r[0]);
    va.push_back(quat_to_euler({r[4], r[5], r[6], r[7]}));
  }
  require_increasing(vt, vicon.lines, vicon_path);

  for (std::size_t i = 0; const auto j : detail::nearest_indices(t, vt)) ds.truth.push_back(t[i++], va[j]);
  return ds;
}

inline Dataset load_ucs(const std::string& path) {
  const auto table = read_csv(path);
  if (table.columns < 13)
    throw SchemaError("'" + path + "': UCS log needs 13 columns including orientation roll/pitch/yaw, found " +
                      std::to_string(table.columns));
  detail::require_columns(table, 13, "UCS log", path);

  Dataset ds;
  ds.imu.source = SourceKind::ucs;
  ds.truth_reliable = {true, true, false};
  std::vector<double> t;
  for (const auto& r : table.rows) {
    ImuSample s;
    s.t = r[0];
    s.gyro = {r[1], r[2], r[3]};
    s.accel = {r[4], r[5], r[6]};
    s.mag = detail::normalized_mag({r[7], r[8], r[9]});
    ds.imu.samples.push_back(s);
    ds.truth.push_back(r[0], {r[10], r[11], r[12]});
    t.push_back(r[0]);
  }
  require_increasing(t, table.lines, path);
  detail::require_length(ds.imu, path);
  return ds;
}

}  // namespace danae
