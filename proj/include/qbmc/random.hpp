#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <random>

namespace qbmc {

using Engine = std::mt19937_64;

namespace detail {

// SplitMix64 step, used only to expand seeds into independent streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Expands (base_seed, stream) into a well-separated 64-bit seed so that
/// generators for designs, noise, masks and chains never share a stream.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream) {
  std::uint64_t s = base_seed;
  std::uint64_t a = detail::splitmix64(s);
  s ^= stream * 0xda942042e4dd58b5ULL;
  std::uint64_t b = detail::splitmix64(s);
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

/// Uniform draw on (0,1]; the open lower end keeps log() finite.
inline double uniform_open01(Engine& eng) {
  return (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
}

/// Uniform draw on [0,1).
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Unbiased uniform integer in [0, n) via rejection on the top bits.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t n) {
  if (n == 0) return 0;
  std::uint64_t mask = ~std::uint64_t{0};
  std::uint64_t limit = n - 1;
  mask >>= (limit == 0) ? 63 : __builtin_clzll(limit);
  for (;;) {
    std::uint64_t draw = eng() & mask;
    if (draw < n) return draw;
  }
}

/// Standard normal via Box-Muller on fresh uniforms. Stateless between
/// calls, which keeps seeded streams reproducible across platforms.
inline double standard_normal(Engine& eng) {
  double u1 = uniform_open01(eng);
  double u2 = uniform01(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

template <typename Derived>
void fill_standard_normal(Engine& eng, Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = standard_normal(eng);
}

}  // namespace qbmc
