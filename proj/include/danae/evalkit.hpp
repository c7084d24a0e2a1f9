#pragma once

// Error statistics against ground truth and KF-vs-DANAE reports.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "danae/dataio/csv.hpp"
#include "danae/errors.hpp"
#include "danae/types.hpp"

namespace danae {

struct Deviation {
  double mean_dev = 0.0;  // mean |d|
  double max_dev = 0.0;   // max |d|
  double rmse = 0.0;      // sqrt(mean d^2)
};

/// Signed difference on the circle, in (-pi, pi].
inline double circular_difference(double a, double b) { return wrap_angle(a - b); }

inline Deviation deviations(std::span<const double> a, std::span<const double> b, bool wrap = false) {
  if (a.size() != b.size())
    throw ShapeError("deviations: series lengths differ (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  if (a.empty()) throw InvalidInputError("deviations: empty series");
  Deviation d;
  double abs_sum = 0.0, sq_sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = std::abs(wrap ? circular_difference(a[i], b[i]) : a[i] - b[i]);
    abs_sum += e;
    sq_sum += e * e;
    d.max_dev = std::max(d.max_dev, e);
  }
  const auto n = static_cast<double>(a.size());
  d.mean_dev = abs_sum / n;
  d.rmse = std::sqrt(sq_sum / n);
  return d;
}

inline Deviation deviations(const AngleSeries& a, const AngleSeries& b, AngleId angle, bool wrap = false) {
  if (a.size() != b.size()) throw ShapeError("deviations: series lengths differ");
  const auto ca = a.channel(angle);
  const auto cb = b.channel(angle);
  return deviations(ca, cb, wrap);
}

/// 100 * (1 - rmse_danae / rmse_kf); empty when the KF error is zero.
inline std::optional<double> rmse_reduction_percent(double rmse_kf, double rmse_danae) {
  if (!(rmse_kf > 0.0)) return std::nullopt;
  return 100.0 * (1.0 - rmse_danae / rmse_kf);
}

struct MetricsReport {
  std::array<Deviation, 3> kf;
  std::array<Deviation, 3> danae;
  std::array<std::optional<double>, 3> rmse_reduction_percent;
  std::optional<double> mean_rmse_reduction_percent;
  std::array<bool, 3> included{true, true, true};
};

/// Mean reduction over the included angles that have a defined reduction.
inline std::optional<double> mean_reduction(const MetricsReport& r) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < 3; ++i)
    if (r.included[i] && r.rmse_reduction_percent[i]) {
      sum += *r.rmse_reduction_percent[i];
      ++count;
    }
  if (count == 0) return std::nullopt;
  return sum / count;
}

/// Report from precomputed per-angle statistics.
inline MetricsReport build_report(const std::array<Deviation, 3>& kf, const std::array<Deviation, 3>& denoised,
                                  std::array<bool, 3> included = {true, true, true}) {
  MetricsReport r;
  r.kf = kf;
  r.danae = denoised;
  r.included = included;
  for (std::size_t i = 0; i < 3; ++i) r.rmse_reduction_percent[i] = rmse_reduction_percent(kf[i].rmse, denoised[i].rmse);
  r.mean_rmse_reduction_percent = mean_reduction(r);
  return r;
}

inline MetricsReport build_report(const AngleSeries& kf, const AngleSeries& denoised, const AngleSeries& gt,
                                  std::array<bool, 3> included = {true, true, true}, bool wrap = false) {
  if (kf.size() != gt.size() || denoised.size() != gt.size())
    throw ShapeError("build_report: kf, danae and ground-truth series must have equal lengths");
  std::array<Deviation, 3> k, d;
  for (auto id : kAllAngles) {
    k[index_of(id)] = deviations(kf, gt, id, wrap);
    d[index_of(id)] = deviations(denoised, gt, id, wrap);
  }
  return build_report(k, d, included);
}

namespace detail {

inline std::string cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%10.4f", v);
  return buf;
}

inline std::string cell(const std::optional<double>& v, const char* fmt = "%9.1f%%") {
  if (!v) return "       n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), fmt, *v);
  return buf;
}

}  // namespace detail

/// Two stacked blocks (KF, DANAE) of mean/max/RMSE rows by angle, then the
/// RMSE reduction row. Excluded angles print as "-".
inline std::string render_table(const MetricsReport& r) {
  std::ostringstream os;
  auto block = [&](const char* title, const std::array<Deviation, 3>& m) {
    os << title;
    for (auto id : kAllAngles) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%10s", std::string(angle_name(id)).c_str());
      os << buf;
    }
    os << "\n";
    const std::pair<const char*, double Deviation::*> rows[] = {
        {"Mean dev. [rad]", &Deviation::mean_dev}, {"Max dev. [rad] ", &Deviation::max_dev},
        {"RMSE [rad]     ", &Deviation::rmse}};
    for (const auto& [label, field] : rows) {
      os << label;
      for (std::size_t i = 0; i < 3; ++i) os << (r.included[i] ? detail::cell(m[i].*field) : "         -");
      os << "\n";
    }
  };
  block("KF             ", r.kf);
  os << "\n";
  block("DANAE          ", r.danae);
  os << "\nRMSE reduction ";
  for (std::size_t i = 0; i < 3; ++i)
    os << (r.included[i] ? detail::cell(r.rmse_reduction_percent[i]) : std::string("         -"));
  os << "\nMean RMSE reduction: " << detail::cell(r.mean_rmse_reduction_percent, "%.1f%%") << "\n";
  return os.str();
}

/// Long-format CSV: estimator,angle,mean_dev,max_dev,rmse,rmse_reduction_percent.
inline std::string report_csv(const MetricsReport& r) {
  std::ostringstream os;
  os << "estimator,angle,mean_dev,max_dev,rmse,rmse_reduction_percent\n";
  for (const auto& [name, m] : {std::pair{"kf", &r.kf}, std::pair{"danae", &r.danae}})
    for (auto id : kAllAngles) {
      const auto i = index_of(id);
      if (!r.included[i]) continue;
      const auto& d = (*m)[i];
      os << name << "," << angle_name(id) << "," << format_real(d.mean_dev) << "," << format_real(d.max_dev) << ","
         << format_real(d.rmse) << ","
         << (r.rmse_reduction_percent[i] ? format_real(*r.rmse_reduction_percent[i]) : std::string("nan")) << "\n";
    }
  os << "mean,all,,,," << (r.mean_rmse_reduction_percent ? format_real(*r.mean_rmse_reduction_percent) : "nan")
     << "\n";
  return os.str();
}

struct LabeledSeries {
  std::string label;
  std::vector<double> values;
};

/// One CSV: t, then one column per labeled series.
inline void emit_plot_data(const std::vector<double>& t, const std::vector<LabeledSeries>& series,
                           const std::string& path) {
  if (series.empty()) throw InvalidInputError("emit_plot_data: no series given");
  std::vector<std::string> header{"t"};
  std::vector<std::vector<double>> cols{t};
  for (const auto& s : series) {
    if (s.values.size() != t.size())
      throw ShapeError("emit_plot_data: series '" + s.label + "' length differs from the time axis");
    header.push_back(s.label);
    cols.push_back(s.values);
  }
  write_csv(path, header, cols);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace danae
