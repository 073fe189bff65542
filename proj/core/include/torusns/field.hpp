#pragma once

#include <array>
#include <complex>
#include <functional>
#include <mutex>
#include <span>
#include <vector>

#include "torusns/grid.hpp"

namespace torusns {

enum class Rank { Scalar, Vector, Matrix, Tensor3 };

int rank_components(Rank r, int d);

/// Scalar/vector/matrix field on a periodic collocation grid with paired
/// Fourier coefficients, lazily synchronized.
///
/// Component layout: vector u -> comp i; matrix A -> comp i*d+j for A_ij;
/// rank-3 T -> comp (i*d+j)*d+m for T_ijm. Differential operators append
/// the derivative index last, so grad(u)_ij = d_j u_i lives at comp i*d+j.
///
/// Values are real, so coefficients are stored on the r2c half lattice and
/// carry Hermitian symmetry. Coefficients are normalized such that
/// value(x) = sum_k c_k exp(i k.x), i.e. c_0 is the mean.
class TorusField {
 public:
  TorusField() = default;
  TorusField(const TorusGrid& grid, Rank rank);

  TorusField(const TorusField& other);
  TorusField& operator=(const TorusField& other);
  TorusField(TorusField&&) noexcept = default;
  TorusField& operator=(TorusField&&) noexcept = default;

  static TorusField scalar(const TorusGrid& g) { return {g, Rank::Scalar}; }
  static TorusField vector(const TorusGrid& g) { return {g, Rank::Vector}; }
  static TorusField matrix(const TorusGrid& g) { return {g, Rank::Matrix}; }

  bool empty() const { return values_.empty() && coeffs_.empty(); }
  const TorusGrid& grid() const { return grid_; }
  Rank rank() const { return rank_; }
  int ncomp() const { return ncomp_; }
  std::size_t npoints() const { return grid_.points(); }
  std::size_t nmodes() const { return grid_.modes(); }

  /// Collocation samples of component c (synchronizes from spectral if needed).
  std::span<const double> values(int c = 0) const;
  /// Mutable samples; marks the spectral side stale.
  std::span<double> values_mut(int c = 0);

  /// Fourier coefficients of component c (synchronizes from physical if needed).
  std::span<const std::complex<double>> coeffs(int c = 0) const;
  /// Mutable coefficients; marks the physical side stale.
  std::span<std::complex<double>> coeffs_mut(int c = 0);

  double mean(int c = 0) const;
  /// Largest pointwise Frobenius magnitude over all components.
  double max_abs() const;

  /// When set, the k=0 coefficient of every component is pinned to zero
  /// (projection happens immediately and after each physical->spectral sync).
  void set_zero_mean(bool on);
  bool zero_mean() const { return zero_mean_; }

  TorusField& operator+=(const TorusField& rhs);
  TorusField& operator-=(const TorusField& rhs);
  TorusField& operator*=(double a);

  friend TorusField operator+(TorusField a, const TorusField& b) { return a += b; }
  friend TorusField operator-(TorusField a, const TorusField& b) { return a -= b; }
  friend TorusField operator*(TorusField a, double s) { return a *= s; }
  friend TorusField operator*(double s, TorusField a) { return a *= s; }

 private:
  void ensure_values() const;
  void ensure_coeffs() const;

  TorusGrid grid_{};
  Rank rank_ = Rank::Scalar;
  int ncomp_ = 0;
  bool zero_mean_ = false;

  enum class State { Empty, Physical, Spectral, Both };
  mutable State state_ = State::Empty;
  mutable std::vector<double> values_;                // ncomp * points
  mutable std::vector<std::complex<double>> coeffs_;  // ncomp * modes
  mutable std::mutex sync_mu_;
};

/// Collocation point with coordinates of the first d axes filled (rest 0).
using Point = std::array<double, 3>;

TorusField sample_scalar(const TorusGrid& g, const std::function<double(const Point&)>& f);
TorusField sample_vector(const TorusGrid& g,
                         const std::function<double(int comp, const Point&)>& f);

}  // namespace torusns
