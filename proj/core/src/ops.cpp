#include "torusns/ops.hpp"

#include <cmath>
#include <stdexcept>

#include "torusns/errors.hpp"
#include "torusns/spectral.hpp"

namespace torusns {

namespace {

Rank rank_up(Rank r) {
  switch (r) {
    case Rank::Scalar: return Rank::Vector;
    case Rank::Vector: return Rank::Matrix;
    case Rank::Matrix: return Rank::Tensor3;
    default: throw std::invalid_argument("grad: rank too high");
  }
}

Rank rank_down(Rank r) {
  switch (r) {
    case Rank::Vector: return Rank::Scalar;
    case Rank::Matrix: return Rank::Vector;
    case Rank::Tensor3: return Rank::Matrix;
    default: throw std::invalid_argument("divergence: scalar has no divergence");
  }
}

}  // namespace

TorusField grad(const TorusField& u) {
  const TorusGrid& g = u.grid();
  TorusField out(g, rank_up(u.rank()));
  const int d = g.d;
  const int nyq = g.nyquist();
  for (int c = 0; c < u.ncomp(); ++c) {
    auto src = u.coeffs(c);
    for (int axis = 0; axis < d; ++axis) {
      auto dst = out.coeffs_mut(c * d + axis);
      detail::for_each_mode(g, [&](std::size_t flat, const int* k, int) {
        bool at_nyquist = false;
        for (int j = 0; j < d; ++j)
          if (k[j] == nyq || k[j] == -nyq) at_nyquist = true;
        dst[flat] = at_nyquist ? 0.0
                               : std::complex<double>(0.0, k[axis]) * src[flat];
      });
    }
  }
  return out;
}

TorusField divergence(const TorusField& u) {
  const TorusGrid& g = u.grid();
  TorusField out(g, rank_down(u.rank()));
  const int d = g.d;
  const int nyq = g.nyquist();
  for (int c = 0; c < out.ncomp(); ++c) {
    auto dst = out.coeffs_mut(c);
    for (int axis = 0; axis < d; ++axis) {
      auto src = u.coeffs(c * d + axis);
      detail::for_each_mode(g, [&](std::size_t flat, const int* k, int) {
        bool at_nyquist = false;
        for (int j = 0; j < d; ++j)
          if (k[j] == nyq || k[j] == -nyq) at_nyquist = true;
        if (!at_nyquist)
          dst[flat] += std::complex<double>(0.0, k[axis]) * src[flat];
      });
    }
  }
  return out;
}

TorusField sym_grad(const TorusField& u) {
  if (u.rank() != Rank::Vector) throw std::invalid_argument("sym_grad: vector field expected");
  const TorusGrid& g = u.grid();
  const int d = g.d;
  TorusField gu = grad(u);
  TorusField out(g, Rank::Matrix);
  const std::size_t nm = g.modes();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      auto a = gu.coeffs(i * d + j);
      auto b = gu.coeffs(j * d + i);
      auto dst = out.coeffs_mut(i * d + j);
      for (std::size_t m = 0; m < nm; ++m) dst[m] = 0.5 * (a[m] + b[m]);
    }
  return out;
}

TorusField laplacian(const TorusField& u) {
  const TorusGrid& g = u.grid();
  TorusField out(g, u.rank());
  for (int c = 0; c < u.ncomp(); ++c) {
    auto src = u.coeffs(c);
    auto dst = out.coeffs_mut(c);
    detail::for_each_mode(g, [&](std::size_t flat, const int* k, int) {
      double k2 = 0.0;
      for (int j = 0; j < g.d; ++j) k2 += static_cast<double>(k[j]) * k[j];
      dst[flat] = -k2 * src[flat];
    });
  }
  return out;
}

TorusField riesz(int axis, const TorusField& u) {
  if (u.rank() != Rank::Scalar) throw std::invalid_argument("riesz: scalar field expected");
  const TorusGrid& g = u.grid();
  if (axis < 0 || axis >= g.d) throw std::invalid_argument("riesz: bad axis");
  auto src = u.coeffs(0);
  double maxmag = 0.0;
  for (auto c : src) maxmag = std::max(maxmag, std::abs(c));
  if (std::abs(src[0]) > 1e-12 * (1.0 + maxmag))
    throw NonZeroMeanError("riesz: input must have zero mean");
  TorusField out(g, Rank::Scalar);
  auto dst = out.coeffs_mut(0);
  const int nyq = g.nyquist();
  detail::for_each_mode(g, [&](std::size_t flat, const int* k, int) {
    double k2 = 0.0;
    bool at_nyquist = false;
    for (int j = 0; j < g.d; ++j) {
      k2 += static_cast<double>(k[j]) * k[j];
      if (k[j] == nyq || k[j] == -nyq) at_nyquist = true;
    }
    if (k2 == 0.0 || at_nyquist) {
      dst[flat] = 0.0;
    } else {
      dst[flat] = std::complex<double>(0.0, k[axis] / std::sqrt(k2)) * src[flat];
    }
  });
  return out;
}

TorusField dealias(const TorusField& u) {
  const TorusGrid& g = u.grid();
  const int cut = g.dealias_cutoff();
  TorusField out = u;
  for (int c = 0; c < u.ncomp(); ++c) {
    auto dst = out.coeffs_mut(c);
    detail::for_each_mode(g, [&](std::size_t flat, const int* k, int) {
      for (int j = 0; j < g.d; ++j) {
        if (k[j] > cut || k[j] < -cut) {
          dst[flat] = 0.0;
          return;
        }
      }
    });
  }
  return out;
}

TorusField multiply(const TorusField& a, const TorusField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("multiply: grid mismatch");
  const std::size_t np = a.npoints();
  if (a.rank() == Rank::Scalar && b.rank() != Rank::Scalar) return multiply(b, a);
  if (b.rank() == Rank::Scalar) {
    TorusField out(a.grid(), a.rank());
    auto s = b.values(0);
    for (int c = 0; c < a.ncomp(); ++c) {
      auto src = a.values(c);
      auto dst = out.values_mut(c);
      for (std::size_t i = 0; i < np; ++i) dst[i] = src[i] * s[i];
    }
    return out;
  }
  if (a.rank() != b.rank()) throw std::invalid_argument("multiply: rank mismatch");
  TorusField out(a.grid(), a.rank());
  for (int c = 0; c < a.ncomp(); ++c) {
    auto x = a.values(c);
    auto y = b.values(c);
    auto dst = out.values_mut(c);
    for (std::size_t i = 0; i < np; ++i) dst[i] = x[i] * y[i];
  }
  return out;
}

TorusField contract_matrix_vector(const TorusField& A, const TorusField& v) {
  if (A.rank() != Rank::Matrix || v.rank() != Rank::Vector)
    throw std::invalid_argument("contract_matrix_vector: matrix and vector expected");
  if (!(A.grid() == v.grid())) throw std::invalid_argument("contract: grid mismatch");
  const TorusGrid& g = A.grid();
  const int d = g.d;
  const std::size_t np = g.points();
  TorusField out(g, Rank::Vector);
  for (int i = 0; i < d; ++i) {
    auto dst = out.values_mut(i);
    for (int j = 0; j < d; ++j) {
      auto a = A.values(i * d + j);
      auto x = v.values(j);
      for (std::size_t m = 0; m < np; ++m) dst[m] += a[m] * x[m];
    }
  }
  return out;
}

TorusField project_zero_mean(const TorusField& u) {
  TorusField out = u;
  for (int c = 0; c < out.ncomp(); ++c) {
    auto dst = out.coeffs_mut(c);
    dst[0] = 0.0;
  }
  return out;
}

double integral(const TorusField& u) {
  if (u.rank() != Rank::Scalar) throw std::invalid_argument("integral: scalar field expected");
  return u.mean(0) * u.grid().volume();
}

double inner_l2(const TorusField& a, const TorusField& b) {
  if (!(a.grid() == b.grid()) || a.rank() != b.rank())
    throw std::invalid_argument("inner_l2: incompatible fields");
  const std::size_t np = a.npoints();
  double acc = 0.0;
  for (int c = 0; c < a.ncomp(); ++c) {
    auto x = a.values(c);
    auto y = b.values(c);
    double s = 0.0;
    for (std::size_t i = 0; i < np; ++i) s += x[i] * y[i];
    acc += s;
  }
  return acc * a.grid().cell_volume();
}

double high_mode_energy_fraction(const TorusField& u) {
  const TorusGrid& g = u.grid();
  const int cut = g.dealias_cutoff();
  double total = 0.0, high = 0.0;
  for (int c = 0; c < u.ncomp(); ++c) {
    auto src = u.coeffs(c);
    detail::for_each_mode(g, [&](std::size_t flat, const int* k, int w) {
      const double e = w * std::norm(src[flat]);
      total += e;
      for (int j = 0; j < g.d; ++j) {
        if (k[j] > cut || k[j] < -cut) {
          high += e;
          return;
        }
      }
    });
  }
  return total > 0.0 ? high / total : 0.0;
}

void require_resolved(const TorusField& u, double reltol) {
  if (high_mode_energy_fraction(u) > reltol)
    throw ResolutionError("field carries too much energy above the dealias band");
}

}  // namespace torusns
