#pragma once

#include <cstdint>
#include <random>

namespace pal {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Engine for sub-stream `stream` of `seed`. Replicate r of any Monte Carlo
/// loop draws from make_stream(seed, r), so results do not depend on how
/// replicates are scheduled over threads.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(seed ^ splitmix64(stream ^ 0xA0761D6478BD642FULL)));
}

/// Seed for a named purpose derived from a master seed (pilot runs, oracles).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed + 0x632BE59BD9B4E019ULL * (tag + 1));
}

/// Uniform on the open interval (0,1).
inline double uniform01(Rng& rng) {
  // 53 random bits, shifted off zero
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline long poisson_draw(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<long> dist(mean);
  return dist(rng);
}

}  // namespace pal
