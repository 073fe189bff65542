#include "torusns/norms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "torusns/ops.hpp"
#include "torusns/spectral.hpp"

namespace torusns {

double norm_lq(const TorusField& u, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("norm_lq: q must be >= 1");
  const std::size_t np = u.npoints();
  const int nc = u.ncomp();
  std::vector<std::span<const double>> comps;
  comps.reserve(nc);
  for (int c = 0; c < nc; ++c) comps.push_back(u.values(c));

  if (std::isinf(q)) {
    double m = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
      double s = 0.0;
      for (int c = 0; c < nc; ++c) s += comps[c][i] * comps[c][i];
      m = std::max(m, s);
    }
    return std::sqrt(m);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    double s = 0.0;
    for (int c = 0; c < nc; ++c) s += comps[c][i] * comps[c][i];
    acc += std::pow(s, 0.5 * q);
  }
  return std::pow(acc * u.grid().cell_volume(), 1.0 / q);
}

double norm_l2(const TorusField& u) { return norm_lq(u, 2.0); }

double norm_linf(const TorusField& u) {
  return norm_lq(u, std::numeric_limits<double>::infinity());
}

double norm_w1q(const TorusField& u, double q) { return norm_lq(u, q) + norm_lq(grad(u), q); }

double norm_w2q(const TorusField& u, double q) {
  TorusField gu = grad(u);
  return norm_lq(u, q) + norm_lq(gu, q) + norm_lq(grad(gu), q);
}

double norm_h1(const TorusField& u) {
  const double a = norm_l2(u);
  const double b = norm_l2(grad(u));
  return std::sqrt(a * a + b * b);
}

double norm_h2(const TorusField& u) {
  TorusField gu = grad(u);
  const double a = norm_l2(u);
  const double b = norm_l2(gu);
  const double c = norm_l2(grad(gu));
  return std::sqrt(a * a + b * b + c * c);
}

double norm_hminus1(const TorusField& u) {
  const TorusGrid& g = u.grid();
  double acc = 0.0;
  for (int c = 0; c < u.ncomp(); ++c) {
    auto src = u.coeffs(c);
    detail::for_each_mode(g, [&](std::size_t flat, const int* k, int w) {
      double k2 = 0.0;
      for (int j = 0; j < g.d; ++j) k2 += static_cast<double>(k[j]) * k[j];
      acc += w * std::norm(src[flat]) / (1.0 + k2);
    });
  }
  return std::sqrt(acc * g.volume());
}

double norm_l2_spectral(const TorusField& u) {
  const TorusGrid& g = u.grid();
  double acc = 0.0;
  for (int c = 0; c < u.ncomp(); ++c) {
    auto src = u.coeffs(c);
    detail::for_each_mode(g, [&](std::size_t flat, const int*, int w) {
      acc += w * std::norm(src[flat]);
    });
  }
  return std::sqrt(acc * g.volume());
}

}  // namespace torusns
