#include "torusns/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "torusns/spectral.hpp"

namespace torusns {

void TorusGrid::validate() const {
  if (d < 1 || d > 3) throw std::invalid_argument("grid: d must be 1, 2, or 3");
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("grid: n must be even and >= 4");
  if (!(dealias_fraction > 0.0) || dealias_fraction > 1.0)
    throw std::invalid_argument("grid: dealias_fraction must lie in (0, 1]");
}

std::size_t TorusGrid::points() const {
  std::size_t p = 1;
  for (int i = 0; i < d; ++i) p *= static_cast<std::size_t>(n);
  return p;
}

std::size_t TorusGrid::modes() const { return points() / n * (n / 2 + 1); }

double TorusGrid::cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < d; ++i) v *= spacing();
  return v;
}

double TorusGrid::volume() const {
  double v = 1.0;
  for (int i = 0; i < d; ++i) v *= kTwoPi;
  return v;
}

int TorusGrid::dealias_cutoff() const {
  return static_cast<int>(dealias_fraction * (n / 2));
}

int rank_components(Rank r, int d) {
  switch (r) {
    case Rank::Scalar: return 1;
    case Rank::Vector: return d;
    case Rank::Matrix: return d * d;
    case Rank::Tensor3: return d * d * d;
  }
  return 0;
}

TorusField::TorusField(const TorusGrid& grid, Rank rank)
    : grid_(grid), rank_(rank), ncomp_(rank_components(rank, grid.d)) {
  grid_.validate();
  values_.assign(ncomp_ * grid_.points(), 0.0);
  coeffs_.assign(ncomp_ * grid_.modes(), std::complex<double>(0.0, 0.0));
  state_ = State::Both;
}

TorusField::TorusField(const TorusField& other)
    : grid_(other.grid_), rank_(other.rank_), ncomp_(other.ncomp_), zero_mean_(other.zero_mean_) {
  std::scoped_lock lock(other.sync_mu_);
  state_ = other.state_;
  values_ = other.values_;
  coeffs_ = other.coeffs_;
}

TorusField& TorusField::operator=(const TorusField& other) {
  if (this == &other) return *this;
  TorusField tmp(other);
  *this = std::move(tmp);
  return *this;
}

void TorusField::ensure_values() const {
  std::scoped_lock lock(sync_mu_);
  if (state_ == State::Physical || state_ == State::Both) return;
  if (state_ == State::Empty) throw std::logic_error("TorusField: empty field");
  values_.resize(ncomp_ * grid_.points());
  for (int c = 0; c < ncomp_; ++c)
    detail::fft_backward(grid_, coeffs_.data() + c * grid_.modes(),
                         values_.data() + c * grid_.points());
  state_ = State::Both;
}

void TorusField::ensure_coeffs() const {
  std::scoped_lock lock(sync_mu_);
  if (state_ == State::Spectral || state_ == State::Both) return;
  if (state_ == State::Empty) throw std::logic_error("TorusField: empty field");
  coeffs_.resize(ncomp_ * grid_.modes());
  for (int c = 0; c < ncomp_; ++c) {
    detail::fft_forward(grid_, values_.data() + c * grid_.points(),
                        coeffs_.data() + c * grid_.modes());
    if (zero_mean_) coeffs_[c * grid_.modes()] = 0.0;
  }
  if (zero_mean_) {
    // keep the stored samples consistent with the projected coefficients
    for (int c = 0; c < ncomp_; ++c)
      detail::fft_backward(grid_, coeffs_.data() + c * grid_.modes(),
                           values_.data() + c * grid_.points());
  }
  state_ = State::Both;
}

std::span<const double> TorusField::values(int c) const {
  ensure_values();
  return {values_.data() + c * grid_.points(), grid_.points()};
}

std::span<double> TorusField::values_mut(int c) {
  ensure_values();
  state_ = State::Physical;
  return {values_.data() + c * grid_.points(), grid_.points()};
}

std::span<const std::complex<double>> TorusField::coeffs(int c) const {
  ensure_coeffs();
  return {coeffs_.data() + c * grid_.modes(), grid_.modes()};
}

std::span<std::complex<double>> TorusField::coeffs_mut(int c) {
  ensure_coeffs();
  state_ = State::Spectral;
  return {coeffs_.data() + c * grid_.modes(), grid_.modes()};
}

double TorusField::mean(int c) const {
  ensure_coeffs();
  return coeffs_[c * grid_.modes()].real();
}

double TorusField::max_abs() const {
  ensure_values();
  const std::size_t np = grid_.points();
  double m = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    double s = 0.0;
    for (int c = 0; c < ncomp_; ++c) {
      const double v = values_[c * np + i];
      s += v * v;
    }
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

void TorusField::set_zero_mean(bool on) {
  zero_mean_ = on;
  if (on && state_ != State::Empty) {
    ensure_coeffs();
    std::scoped_lock lock(sync_mu_);
    bool changed = false;
    for (int c = 0; c < ncomp_; ++c) {
      if (coeffs_[c * grid_.modes()] != std::complex<double>(0.0, 0.0)) {
        coeffs_[c * grid_.modes()] = 0.0;
        changed = true;
      }
    }
    if (changed) {
      for (int c = 0; c < ncomp_; ++c)
        detail::fft_backward(grid_, coeffs_.data() + c * grid_.modes(),
                             values_.data() + c * grid_.points());
      state_ = State::Both;
    }
  }
}

namespace {
void check_compatible(const TorusField& a, const TorusField& b) {
  if (!(a.grid() == b.grid()) || a.rank() != b.rank())
    throw std::invalid_argument("TorusField: incompatible operands");
}
}  // namespace

TorusField& TorusField::operator+=(const TorusField& rhs) {
  check_compatible(*this, rhs);
  const std::size_t np = grid_.points();
  for (int c = 0; c < ncomp_; ++c) {
    auto dst = values_mut(c);
    auto src = rhs.values(c);
    for (std::size_t i = 0; i < np; ++i) dst[i] += src[i];
  }
  return *this;
}

TorusField& TorusField::operator-=(const TorusField& rhs) {
  check_compatible(*this, rhs);
  const std::size_t np = grid_.points();
  for (int c = 0; c < ncomp_; ++c) {
    auto dst = values_mut(c);
    auto src = rhs.values(c);
    for (std::size_t i = 0; i < np; ++i) dst[i] -= src[i];
  }
  return *this;
}

TorusField& TorusField::operator*=(double a) {
  const std::size_t np = grid_.points();
  for (int c = 0; c < ncomp_; ++c) {
    auto dst = values_mut(c);
    for (std::size_t i = 0; i < np; ++i) dst[i] *= a;
  }
  return *this;
}

namespace {

template <typename F>
void fill_samples(TorusField& out, F&& f) {
  const TorusGrid& g = out.grid();
  const int n = g.n;
  const double h = g.spacing();
  for (int c = 0; c < out.ncomp(); ++c) {
    auto vals = out.values_mut(c);
    std::size_t idx = 0;
    Point x{0.0, 0.0, 0.0};
    if (g.d == 1) {
      for (int i0 = 0; i0 < n; ++i0, ++idx) {
        x[0] = i0 * h;
        vals[idx] = f(c, x);
      }
    } else if (g.d == 2) {
      for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1, ++idx) {
          x[0] = i0 * h;
          x[1] = i1 * h;
          vals[idx] = f(c, x);
        }
    } else {
      for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
          for (int i2 = 0; i2 < n; ++i2, ++idx) {
            x[0] = i0 * h;
            x[1] = i1 * h;
            x[2] = i2 * h;
            vals[idx] = f(c, x);
          }
    }
  }
}

}  // namespace

TorusField sample_scalar(const TorusGrid& g, const std::function<double(const Point&)>& f) {
  TorusField out(g, Rank::Scalar);
  fill_samples(out, [&f](int, const Point& x) { return f(x); });
  return out;
}

TorusField sample_vector(const TorusGrid& g,
                         const std::function<double(int, const Point&)>& f) {
  TorusField out(g, Rank::Vector);
  fill_samples(out, f);
  return out;
}

}  // namespace torusns
