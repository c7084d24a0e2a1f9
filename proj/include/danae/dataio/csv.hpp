#pragma once

// Minimal numeric CSV reader/writer shared by the loaders and the report
// emitters. A first line that does not parse as numbers is a header.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "danae/errors.hpp"
#include "danae/types.hpp"

namespace danae {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> lines;  // 1-based source line of each row
  std::size_t columns = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

/// Reads a numeric CSV. Every data row must have the same column count as the
/// first line; blank lines and lines starting with '#' are skipped.
inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto fields = detail::split_fields(trimmed);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size() && numeric; ++i) numeric = detail::parse_double(fields[i], row[i]);
    if (first) {
      first = false;
      table.columns = fields.size();
      if (!numeric) {
        for (auto f : fields) table.header.emplace_back(f);
        continue;
      }
    }
    if (fields.size() != table.columns) {
      std::ostringstream os;
      os << "'" << path << "': expected " << table.columns << " columns, found " << fields.size();
      throw ParseError(os.str(), line_no);
    }
    if (!numeric) throw ParseError("'" + path + "': non-numeric field", line_no);
    table.rows.push_back(std::move(row));
    table.lines.push_back(line_no);
  }
  if (table.rows.empty()) throw ParseError("'" + path + "': no data rows", line_no == 0 ? 1 : line_no);
  return table;
}

/// Shortest text that reads back to the same double.
inline std::string format_real(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << format_real(columns[c][r]);
    out << '\n';
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline void require_increasing(const std::vector<double>& t, const std::vector<std::size_t>& lines,
                               const std::string& path) {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) {
      std::ostringstream os;
      os << "'" << path << "': timestamp at line " << lines[i] << " (row " << i << ") is not strictly increasing";
      throw DataError(os.str());
    }
}

// Canonical angle series file: t, roll, pitch, yaw.

inline void write_angle_series(const std::string& path, const AngleSeries& s) {
  write_csv(path, {"t", "roll", "pitch", "yaw"},
            {s.t, s.channel(AngleId::roll), s.channel(AngleId::pitch), s.channel(AngleId::yaw)});
}

inline AngleSeries read_angle_series(const std::string& path) {
  const auto table = read_csv(path);
  if (table.columns != 4)
    throw SchemaError("'" + path + "': angle series needs 4 columns (t,roll,pitch,yaw), found " +
                      std::to_string(table.columns));
  AngleSeries s;
  for (const auto& r : table.rows) s.push_back(r[0], {r[1], r[2], r[3]});
  for (const auto& a : s.angles)
    if (!a.finite()) throw DataError("'" + path + "': non-finite angle");
  require_increasing(s.t, table.lines, path);
  return s;
}

// Canonical IMU file: t, gyro xyz, accel xyz, mag xyz.

inline void write_imu_series(const std::string& path, const ImuSeries& s) {
  std::vector<std::vector<double>> cols(10);
  for (const auto& x : s.samples) {
    cols[0].push_back(x.t);
    for (int i = 0; i < 3; ++i) {
      cols[1 + i].push_back(x.gyro[i]);
      cols[4 + i].push_back(x.accel[i]);
      cols[7 + i].push_back(x.mag[i]);
    }
  }
  write_csv(path,
            {"t", "gyro_x", "gyro_y", "gyro_z", "accel_x", "accel_y", "accel_z", "mag_x", "mag_y", "mag_z"},
            cols);
}

inline ImuSeries read_imu_series(const std::string& path, SourceKind source = SourceKind::synthetic) {
  const auto table = read_csv(path);
  if (table.columns != 10)
    throw SchemaError("'" + path + "': IMU file needs 10 columns (t, gyro xyz, accel xyz, mag xyz), found " +
                      std::to_string(table.columns));
  ImuSeries s;
  s.source = source;
  std::vector<double> t;
  for (const auto& r : table.rows) {
    ImuSample x;
    x.t = r[0];
    x.gyro = {r[1], r[2], r[3]};
    x.accel = {r[4], r[5], r[6]};
    x.mag = {r[7], r[8], r[9]};
    s.samples.push_back(x);
    t.push_back(r[0]);
  }
  require_increasing(t, table.lines, path);
  return s;
}

}  // namespace danae
