#pragma once

#include <cstddef>

namespace torusns {

inline constexpr double kTwoPi = 6.28318530717958647692528676655900577;

/// Uniform collocation grid on the flat torus [0, 2*pi)^d.
///
/// Collocation points are x_j = 2*pi*j/n per axis; the paired spectral
/// representation uses integer wavevectors |k_j| <= n/2 stored in the
/// real-to-complex half lattice (last axis truncated to n/2+1 entries).
struct TorusGrid {
  int d = 3;
  int n = 32;
  double dealias_fraction = 2.0 / 3.0;

  /// Throws std::invalid_argument unless d in {1,2,3}, n even and >= 4,
  /// and dealias_fraction in (0,1].
  void validate() const;

  std::size_t points() const;  // n^d
  std::size_t modes() const;   // n^(d-1) * (n/2 + 1)

  double spacing() const { return kTwoPi / n; }
  double cell_volume() const;
  double volume() const;

  int nyquist() const { return n / 2; }
  /// Largest retained |k_j| under the dealiasing rule.
  int dealias_cutoff() const;

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;
};

}  // namespace torusns
