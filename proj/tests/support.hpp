#pragma once

#include <random>
#include <vector>

#include "nsbound/channel.hpp"

namespace nsbound::fixtures {

/// Random channel; each entry is zero with probability `zero_prob` (every
/// row keeps at least one positive entry).
inline Channel random_channel(std::mt19937_64& rng, std::size_t A, std::size_t B, double zero_prob = 0.2) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> rows(A, std::vector<double>(B));
  for (auto& row : rows) {
    double s = 0;
    for (auto& v : row) {
      v = u(rng) < zero_prob ? 0.0 : u(rng) + 0.01;
      s += v;
    }
    if (s == 0) {
      row[std::uniform_int_distribution<std::size_t>(0, B - 1)(rng)] = 1.0;
      s = 1.0;
    }
    for (auto& v : row) v /= s;
  }
  return Channel(std::move(rows));
}

/// Random channel with entries that are multiples of 1/den, so that float
/// and exact arithmetic see the same decimal data when den divides a power of 10.
inline Channel random_decimal_channel(std::mt19937_64& rng, std::size_t A, std::size_t B, int den = 20) {
  std::vector<std::vector<double>> rows(A, std::vector<double>(B, 0.0));
  std::uniform_int_distribution<std::size_t> pick(0, B - 1);
  for (auto& row : rows) {
    std::vector<int> units(B, 0);
    for (int k = 0; k < den; ++k) ++units[pick(rng)];
    for (std::size_t y = 0; y < B; ++y) row[y] = static_cast<double>(units[y]) / den;
  }
  return Channel(std::move(rows));
}

inline std::size_t random_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n, double zero_prob = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  double s = 0;
  for (auto& v : p) {
    v = u(rng) < zero_prob ? 0.0 : u(rng) + 0.01;
    s += v;
  }
  if (s == 0) {
    p[0] = 1;
    s = 1;
  }
  for (auto& v : p) v /= s;
  return p;
}

}  // namespace nsbound::fixtures
