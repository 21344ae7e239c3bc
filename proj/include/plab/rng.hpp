#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace plab {

/// Mixes a seed with a stream index; used to derive per-orbit and
/// per-purpose seeds so results do not depend on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

// The standard distributions are implementation-defined; these are not.
inline double uniform01(Rng& rng) { return double(rng() >> 11) * 0x1.0p-53; }

inline std::complex<double> uniform_disc(Rng& rng, double radius) {
  const double r = radius * std::sqrt(uniform01(rng));
  const double a = 2.0 * std::numbers::pi * uniform01(rng);
  return {r * std::cos(a), r * std::sin(a)};
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * double(n)) % n;
}

}  // namespace plab
