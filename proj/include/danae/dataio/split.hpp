#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "danae/errors.hpp"

namespace danae {

/// Hold out one recording session (1-based run number) as the test set.
struct SessionHoldout {
  std::size_t run = 1;
};

/// Temporal cut: the first floor(fraction * N) samples train, the rest test.
struct FractionSplit {
  double fraction = 0.8;
};

inline std::size_t split_index(std::size_t n, FractionSplit policy) {
  if (!(policy.fraction > 0.0 && policy.fraction < 1.0))
    throw InvalidInputError("fraction split needs 0 < fraction < 1");
  // The epsilon absorbs representation error such as 0.8 * 5 = 3.9999...
  return static_cast<std::size_t>(std::floor(policy.fraction * static_cast<double>(n) + 1e-9));
}

template <class Series>
std::pair<Series, Series> split(const Series& series, FractionSplit policy) {
  const std::size_t cut = split_index(series.size(), policy);
  return {series.slice(0, cut), series.slice(cut, series.size())};
}

template <class Session>
std::pair<std::vector<Session>, std::vector<Session>> split(const std::vector<Session>& sessions,
                                                            SessionHoldout policy) {
  if (sessions.size() < 2) throw InvalidInputError("session holdout needs at least 2 sessions");
  if (policy.run < 1 || policy.run > sessions.size())
    throw InvalidInputError("held-out run " + std::to_string(policy.run) + " does not exist");
  std::pair<std::vector<Session>, std::vector<Session>> out;
  for (std::size_t i = 0; i < sessions.size(); ++i)
    (i + 1 == policy.run ? out.second : out.first).push_back(sessions[i]);
  return out;
}

}  // namespace danae
