#pragma once

#include <cstdint>
#include <random>

// Deterministic random streams. mt19937_64 and seed_seq are both fully
// specified by the standard, and the uniform mapping below avoids
// std::uniform_real_distribution (whose output is implementation defined),
// so identical seeds give identical event streams on every platform.

namespace twistkin {

// Independent substream for a (seed, chunk) pair.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(chunk),
      static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Standard normal pair (Box-Muller, branch-free acceptance).
inline void normal_pair(std::mt19937_64& g, double& n1, double& n2) {
  double u1 = uniform01(g);
  while (u1 == 0.0) u1 = uniform01(g);
  const double u2 = uniform01(g);
  const double r = std::sqrt(-2.0 * std::log(u1));
  n1 = r * std::cos(2.0 * M_PI * u2);
  n2 = r * std::sin(2.0 * M_PI * u2);
}

}  // namespace twistkin
