#pragma once

#include <cstdint>

#include "torusns/field.hpp"

namespace torusns {

/// Band-limited random field specification. Draws are counter-based: every
/// retained mode's coefficient is derived by hashing (seed, stream, comp,
/// wavevector), so the result is independent of traversal order and stable
/// across platforms.
struct RandomSpec {
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;  // distinguishes independent draws per seed
  int kmin = 1;
  int kmax = 4;          // retained band: kmin <= |k|_inf <= kmax
  double decay = 2.0;    // amplitude ~ (1+|k|^2)^(-decay/2)
  double amplitude = 1.0;
  bool zero_mean = true;
};

TorusField random_band_limited(const TorusGrid& g, Rank rank, const RandomSpec& spec);

namespace detail {
/// splitmix64 step; the primitive behind the counter-based draws.
std::uint64_t hash64(std::uint64_t x);
/// Uniform double in [-1, 1) from a 64-bit state.
double uniform_pm1(std::uint64_t h);
}  // namespace detail

}  // namespace torusns
