#pragma once

// Portable seeded draws: std::mt19937_64 is fully specified, the standard
// distributions are not.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ppgbp::rng {

using Engine = std::mt19937_64;

/// [0, 1) with 53 random bits.
inline double uniform01(Engine& e) { return static_cast<double>(e() >> 11) * 0x1.0p-53; }

/// Unbiased integer in [0, bound).
inline std::uint64_t below(Engine& e, std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do x = e();
  while (x >= limit);
  return x % bound;
}

template <typename T>
void shuffle(std::vector<T>& v, Engine& e) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(e, i)]);
}

/// Box-Muller standard normal.
inline double normal(Engine& e) {
  double u1 = uniform01(e);
  while (u1 <= 0.0) u1 = uniform01(e);
  const double u2 = uniform01(e);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925 * u2);
}

}  // namespace ppgbp::rng
