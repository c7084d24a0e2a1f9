#pragma once

// Linear Kalman filter over Euler angles. The state is (roll, pitch, yaw),
// gyro-derived angle increments drive the prediction and accelerometer /
// magnetometer angles are the measurement.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "danae/errors.hpp"
#include "danae/types.hpp"

namespace danae {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct KfConfig {
  int n = 3;
  MatrixXd A = MatrixXd::Identity(3, 3);
  MatrixXd B = MatrixXd::Identity(3, 3);
  MatrixXd C = MatrixXd::Identity(3, 3);
  MatrixXd Q = MatrixXd::Identity(3, 3);
  MatrixXd R = MatrixXd::Identity(3, 3);
  MatrixXd P0 = MatrixXd::Identity(3, 3);

  static KfConfig identity(int n) {
    KfConfig c;
    c.n = n;
    c.A = c.B = c.C = c.Q = c.R = c.P0 = MatrixXd::Identity(n, n);
    return c;
  }

  void validate() const {
    if (n < 1) throw ConfigError("state dimension must be >= 1");
    auto check = [this](const MatrixXd& m, const char* name, bool covariance) {
      if (m.rows() != n || m.cols() != n) {
        std::ostringstream os;
        os << "matrix " << name << " is " << m.rows() << "x" << m.cols() << ", expected " << n << "x" << n;
        throw ConfigError(os.str());
      }
      if (!m.allFinite()) throw ConfigError(std::string("matrix ") + name + " has non-finite entries");
      if (covariance) {
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
          throw ConfigError(std::string("matrix ") + name + " is not symmetric");
        if ((m.diagonal().array() < 0.0).any())
          throw ConfigError(std::string("matrix ") + name + " has a negative diagonal entry");
      }
    };
    check(A, "A", false);
    check(B, "B", false);
    check(C, "C", false);
    check(Q, "Q", true);
    check(R, "R", true);
    check(P0, "P0", true);
  }
};

struct KfState {
  VectorXd x;
  MatrixXd P;
};

/// Gravity-tilt roll and pitch from a specific-force reading.
inline std::pair<double, double> accel_to_roll_pitch(const Vec3& accel) {
  if (!accel.allFinite() || accel.norm() <= 0.0) throw InvalidInputError("accelerometer magnitude is zero");
  const double roll = std::atan2(accel.y(), accel.z());
  const double pitch = std::atan2(-accel.x(), std::hypot(accel.y(), accel.z()));
  return {wrap_angle(roll), pitch};
}

/// Tilt-compensated compass heading.
inline double mag_to_yaw(const Vec3& mag, double roll, double pitch) {
  if (!mag.allFinite() || mag.norm() <= 0.0) throw InvalidInputError("magnetometer magnitude is zero");
  const double sr = std::sin(roll), cr = std::cos(roll);
  const double sp = std::sin(pitch), cp = std::cos(pitch);
  const double hx = cp * mag.x() + sp * (sr * mag.y() + cr * mag.z());
  const double hy = cr * mag.y() - sr * mag.z();
  if (std::hypot(hx, hy) < 1e-9) throw NumericalError("horizontal magnetic component vanishes; heading is undefined");
  return wrap_angle(std::atan2(-hy, hx));
}

inline constexpr double kGimbalLockMargin = 1e-6;

/// Body rates to Euler-angle increments over dt.
inline Vec3 gyro_delta(const Vec3& gyro, double roll, double pitch, double dt) {
  if (!(dt > 0.0)) throw InvalidInputError("dt must be positive");
  if (std::abs(pitch) >= std::numbers::pi / 2 - kGimbalLockMargin)
    throw NumericalError("pitch at gimbal lock; Euler-rate kinematics are singular");
  const double sr = std::sin(roll), cr = std::cos(roll);
  const double tp = std::tan(pitch), cp = std::cos(pitch);
  const double p = gyro.x(), q = gyro.y(), r = gyro.z();
  return Vec3{p + sr * tp * q + cr * tp * r, cr * q - sr * r, (sr / cp) * q + (cr / cp) * r} * dt;
}

/// One predict + update cycle. P is symmetrized on the way out.
inline KfState kf_step(const KfState& state, const KfConfig& cfg, const VectorXd& u, const VectorXd& y) {
  const auto n = static_cast<Eigen::Index>(cfg.n);
  if (state.x.size() != n || state.P.rows() != n || state.P.cols() != n || u.size() != n || y.size() != n)
    throw ShapeError("kf_step: state, input or measurement dimension differs from cfg.n");

  const VectorXd x_prior = cfg.A * state.x + cfg.B * u;
  const MatrixXd P_prior = cfg.A * state.P * cfg.A.transpose() + cfg.Q;

  const MatrixXd S = cfg.C * P_prior * cfg.C.transpose() + cfg.R;
  Eigen::FullPivLU<MatrixXd> lu(S.transpose());
  if (!lu.isInvertible()) {
    Eigen::JacobiSVD<MatrixXd> svd(S);
    const auto sv = svd.singularValues();
    std::ostringstream os;
    os << "innovation covariance is singular (condition number "
       << (sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY) << ")";
    throw NumericalError(os.str());
  }
  // K^T = S^-T C P'^T
  const MatrixXd K = lu.solve(cfg.C * P_prior.transpose()).transpose();

  KfState out;
  out.x = x_prior + K * (y - cfg.C * x_prior);
  const MatrixXd I = MatrixXd::Identity(n, n);
  const MatrixXd P = (I - K * cfg.C) * P_prior;
  out.P = 0.5 * (P + P.transpose());
  return out;
}

/// Raw measurement angles for one sample: accel roll/pitch plus tilt-compensated yaw.
inline EulerAngles measure_angles(const ImuSample& s) {
  const auto [roll, pitch] = accel_to_roll_pitch(s.accel);
  return {roll, pitch, mag_to_yaw(s.mag, roll, pitch)};
}

/// Angle increment between samples k-1 and k, using the mean of the two
/// gyro readings and the attitude at k-1.
inline Vec3 step_increment(const ImuSample& prev, const ImuSample& cur, double roll, double pitch) {
  return gyro_delta(0.5 * (prev.gyro + cur.gyro), roll, pitch, cur.t - prev.t);
}

struct KfRunLog {
  std::vector<std::size_t> skipped_updates;
};

/// Runs the filter over a whole series; one estimate per sample. The yaw
/// state is kept continuous (not re-wrapped) so the output has no 2*pi jumps.
inline AngleSeries run_kf(std::span<const ImuSample> series, const KfConfig& cfg = {}, KfRunLog* log = nullptr) {
  if (series.size() < 2) throw InvalidInputError("run_kf needs at least 2 samples");
  if (cfg.n != 3) throw ConfigError("run_kf requires a 3-dimensional state");
  cfg.validate();

  AngleSeries out;
  out.t.reserve(series.size());
  out.angles.reserve(series.size());

  const EulerAngles first = measure_angles(series[0]);
  KfState state{VectorXd(3), cfg.P0};
  state.x << first.roll, first.pitch, first.yaw;
  out.push_back(series[0].t, first);

  for (std::size_t k = 1; k < series.size(); ++k) {
    const Vec3 du = step_increment(series[k - 1], series[k], state.x(0), state.x(1));
    const VectorXd u = du;

    EulerAngles meas;
    bool have_measurement = true;
    try {
      meas = measure_angles(series[k]);
    } catch (const InvalidInputError&) {
      have_measurement = false;
    } catch (const NumericalError&) {
      have_measurement = false;
    }

    if (have_measurement) {
      VectorXd y(3);
      y << meas.roll, meas.pitch, meas.yaw;
      // Shift the yaw measurement onto the branch nearest the prediction.
      const VectorXd predicted = cfg.C * (cfg.A * state.x + cfg.B * u);
      constexpr double kTwoPi = 2.0 * std::numbers::pi;
      y(2) += kTwoPi * std::round((predicted(2) - y(2)) / kTwoPi);
      state = kf_step(state, cfg, u, y);
    } else {
      if (log) log->skipped_updates.push_back(k);
      state.x = cfg.A * state.x + cfg.B * u;
      const MatrixXd P = cfg.A * state.P * cfg.A.transpose() + cfg.Q;
      state.P = 0.5 * (P + P.transpose());
    }
    out.push_back(series[k].t, {state.x(0), state.x(1), state.x(2)});
  }
  return out;
}

inline AngleSeries run_kf(const ImuSeries& series, const KfConfig& cfg = {}, KfRunLog* log = nullptr) {
  return run_kf(std::span<const ImuSample>(series.samples), cfg, log);
}

/// Dead-reckoning baseline: the prediction path of run_kf with no updates,
/// starting from the measured attitude of sample 0.
inline AngleSeries integrate_gyro(std::span<const ImuSample> series) {
  if (series.empty()) throw InvalidInputError("integrate_gyro needs at least 1 sample");
  AngleSeries out;
  EulerAngles a = measure_angles(series[0]);
  out.push_back(series[0].t, a);
  for (std::size_t k = 1; k < series.size(); ++k) {
    const Vec3 d = step_increment(series[k - 1], series[k], a.roll, a.pitch);
    a = {a.roll + d.x(), a.pitch + d.y(), a.yaw + d.z()};
    out.push_back(series[k].t, a);
  }
  return out;
}

/// Angles computed from each sample's accel/mag alone.
inline AngleSeries measurement_angles(std::span<const ImuSample> series) {
  AngleSeries out;
  for (const auto& s : series) out.push_back(s.t, measure_angles(s));
  return out;
}

}  // namespace danae
