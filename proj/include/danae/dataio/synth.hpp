#pragma once

// Synthetic IMU generator with exact ground truth. The body follows
// sinusoidal Euler angles with no linear acceleration; the sensors see
//   gyro  = body rate (inverse Euler kinematics) + bias + N(0, gyro_sigma)
//   accel = R^T (0, 0, g) + N(0, accel_sigma)
//   mag   = R^T m_world + N(0, mag_sigma)
// where R = Rz(yaw) Ry(pitch) Rx(roll) and m_world points north with a
// downward dip.

#include <Eigen/Geometry>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "danae/dataio/keyvalue.hpp"
#include "danae/dataio/loaders.hpp"
#include "danae/errors.hpp"
#include "danae/types.hpp"

namespace danae {

struct AngleWave {
  double amplitude = 0.0;  // rad
  double frequency = 0.0;  // Hz
  double phase = 0.0;      // rad
  double offset = 0.0;     // rad
};

inline constexpr double kMaxSynthPitch = 1.2;

struct SynthConfig {
  double duration = 120.0;  // s
  double rate = 100.0;      // Hz
  std::array<AngleWave, 3> waves{{{0.4, 0.05, 0.0, 0.0}, {0.3, 0.03, 0.5, 0.0}, {0.8, 0.02, 1.0, 0.0}}};
  double gyro_sigma = 0.02;  // rad/s
  double gyro_bias = 0.01;   // rad/s, same on every axis
  double accel_sigma = 0.5;  // m/s^2
  double mag_sigma = 0.05;   // unitless
  double mag_dip = 1.0;      // rad below the horizon
  std::uint64_t seed = 42;

  std::size_t sample_count() const { return static_cast<std::size_t>(std::llround(duration * rate)); }

  void validate() const {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw ConfigError("synth: rate must be > 0");
    if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("synth: duration must be > 0");
    if (sample_count() < 2) throw ConfigError("synth: duration * rate must give at least 2 samples");
    for (double s : {gyro_sigma, accel_sigma, mag_sigma})
      if (!(s >= 0.0)) throw ConfigError("synth: noise sigmas must be >= 0");
    if (!std::isfinite(gyro_bias)) throw ConfigError("synth: gyro_bias must be finite");
    if (std::abs(mag_dip) >= std::numbers::pi / 2 - 1e-3)
      throw ConfigError("synth: mag_dip leaves no horizontal field component");
    for (const auto& w : waves)
      if (!std::isfinite(w.amplitude) || !std::isfinite(w.frequency) || !std::isfinite(w.phase) ||
          !std::isfinite(w.offset) || w.frequency < 0.0)
        throw ConfigError("synth: wave parameters must be finite with frequency >= 0");
    const auto& p = waves[index_of(AngleId::pitch)];
    if (std::abs(p.offset) + std::abs(p.amplitude) >= kMaxSynthPitch)
      throw ConfigError("synth: pitch trajectory must stay within |pitch| < 1.2 rad");
  }

  /// Every configurable key, in file order.
  static std::vector<std::string> keys() {
    std::vector<std::string> k{"duration", "rate"};
    for (const char* a : {"roll", "pitch", "yaw"})
      for (const char* f : {"amplitude", "frequency", "phase", "offset"}) k.push_back(std::string(a) + "_" + f);
    for (const char* s : {"gyro_sigma", "gyro_bias", "accel_sigma", "mag_sigma", "mag_dip", "seed"}) k.emplace_back(s);
    return k;
  }

  void set(const std::string& key, const std::string& value) {
    if (key == "seed") {
      const double v = parse_real_value(key, value);
      if (v < 0 || v != std::floor(v)) throw ConfigError("config key 'seed' must be a non-negative integer");
      seed = static_cast<std::uint64_t>(v);
      return;
    }
    const double v = parse_real_value(key, value);
    if (key == "duration") duration = v;
    else if (key == "rate") rate = v;
    else if (key == "gyro_sigma") gyro_sigma = v;
    else if (key == "gyro_bias") gyro_bias = v;
    else if (key == "accel_sigma") accel_sigma = v;
    else if (key == "mag_sigma") mag_sigma = v;
    else if (key == "mag_dip") mag_dip = v;
    else {
      const auto us = key.find('_');
      if (us == std::string::npos) throw ConfigError("unknown config key '" + key + "'");
      AngleId id;
      try {
        id = parse_angle(key.substr(0, us));
      } catch (const InvalidInputError&) {
        throw ConfigError("unknown config key '" + key + "'");
      }
      auto& w = waves[index_of(id)];
      const auto field = key.substr(us + 1);
      if (field == "amplitude") w.amplitude = v;
      else if (field == "frequency") w.frequency = v;
      else if (field == "phase") w.phase = v;
      else if (field == "offset") w.offset = v;
      else throw ConfigError("unknown config key '" + key + "'");
    }
  }

  std::map<std::string, std::string> to_key_values() const {
    std::map<std::string, std::string> kv;
    kv["duration"] = format_real(duration);
    kv["rate"] = format_real(rate);
    for (auto id : kAllAngles) {
      const auto& w = waves[index_of(id)];
      const std::string a(angle_name(id));
      kv[a + "_amplitude"] = format_real(w.amplitude);
      kv[a + "_frequency"] = format_real(w.frequency);
      kv[a + "_phase"] = format_real(w.phase);
      kv[a + "_offset"] = format_real(w.offset);
    }
    kv["gyro_sigma"] = format_real(gyro_sigma);
    kv["gyro_bias"] = format_real(gyro_bias);
    kv["accel_sigma"] = format_real(accel_sigma);
    kv["mag_sigma"] = format_real(mag_sigma);
    kv["mag_dip"] = format_real(mag_dip);
    kv["seed"] = std::to_string(seed);
    return kv;
  }

  static SynthConfig from_file(const std::string& path) {
    SynthConfig c;
    for (const auto& [k, v] : read_key_values(path)) c.set(k, v);
    return c;
  }
};

namespace detail {

/// Rows of R^T for R = Rz(yaw) Ry(pitch) Rx(roll), i.e. world -> body.
inline Eigen::Matrix3d world_to_body(const EulerAngles& a) {
  const Eigen::Matrix3d R = (Eigen::AngleAxisd(a.yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(a.pitch, Vec3::UnitY()) *
                             Eigen::AngleAxisd(a.roll, Vec3::UnitX()))
                                .toRotationMatrix();
  return R.transpose();
}

}  // namespace detail

/// Generates the sensor series and its exact ground truth; deterministic in
/// cfg.seed.
inline Dataset synth_trajectory(const SynthConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.sample_count();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  auto noise3 = [&](double sigma) -> Vec3 {
    const double x = unit(rng), y = unit(rng), z = unit(rng);
    return Vec3(x, y, z) * sigma;
  };

  const Vec3 field(std::cos(cfg.mag_dip), 0.0, -std::sin(cfg.mag_dip));
  const Vec3 gravity(0.0, 0.0, kStandardGravity);

  Dataset ds;
  ds.imu.source = SourceKind::synthetic;
  ds.imu.samples.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / cfg.rate;
    EulerAngles a, rate;
    for (auto id : kAllAngles) {
      const auto& w = cfg.waves[index_of(id)];
      const double omega = 2.0 * std::numbers::pi * w.frequency;
      a[index_of(id)] = w.offset + w.amplitude * std::sin(omega * t + w.phase);
      rate[index_of(id)] = w.amplitude * omega * std::cos(omega * t + w.phase);
    }
    const double sr = std::sin(a.roll), cr = std::cos(a.roll);
    const double sp = std::sin(a.pitch), cp = std::cos(a.pitch);
    const Vec3 body_rate(rate.roll - sp * rate.yaw, cr * rate.pitch + sr * cp * rate.yaw,
                         -sr * rate.pitch + cr * cp * rate.yaw);
    const Eigen::Matrix3d Rt = detail::world_to_body(a);

    ImuSample s;
    s.t = t;
    s.gyro = body_rate + Vec3::Constant(cfg.gyro_bias) + noise3(cfg.gyro_sigma);
    s.accel = Rt * gravity + noise3(cfg.accel_sigma);
    s.mag = Rt * field + noise3(cfg.mag_sigma);
    ds.imu.samples.push_back(s);
    ds.truth.push_back(t, {wrap_angle(a.roll), a.pitch, wrap_angle(a.yaw)});
  }
  return ds;
}

}  // namespace danae
