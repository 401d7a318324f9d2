#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "movsph/point.hpp"

namespace movsph {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; decorrelates (seed, stream) pairs.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent deterministic stream `index` derived from a run seed. Each
/// parallel work item gets its own stream so results do not depend on the
/// thread count.
inline Rng make_stream(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(seed ^ splitmix64(index + 0x632BE59BD9B4E019ULL)));
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

/// Uniform direction on S^{dim-1}.
inline Point random_direction(Rng& rng, std::size_t dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  Point p(dim);
  double n2 = 0.0;
  do {
    for (std::size_t i = 0; i < dim; ++i) p[i] = g(rng);
    n2 = p.norm2();
  } while (n2 < 1e-20);
  return p * (1.0 / std::sqrt(n2));
}

}  // namespace movsph
