#pragma once

#include <fstream>
#include <map>
#include <string>

#include "danae/dataio/csv.hpp"
#include "danae/errors.hpp"

namespace danae {

/// Plain-text `key = value` lines; '#' starts a comment.
inline std::map<std::string, std::string> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError("'" + path + "' line " + std::to_string(line_no) + ": expected key=value");
    const auto key = detail::trim(body.substr(0, eq));
    const auto value = detail::trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError("'" + path + "' line " + std::to_string(line_no) + ": empty key");
    kv[std::string(key)] = std::string(value);
  }
  return kv;
}

inline double parse_real_value(const std::string& key, const std::string& value) {
  double v = 0.0;
  if (!detail::parse_double(value, v)) throw ConfigError("config key '" + key + "': '" + value + "' is not a number");
  return v;
}

}  // namespace danae
