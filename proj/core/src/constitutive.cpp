#include "torusns/constitutive.hpp"

#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "torusns/errors.hpp"
#include "torusns/norms.hpp"
#include "torusns/ops.hpp"

namespace torusns {

ConstitutiveLaw::ConstitutiveLaw(std::string name, ScalarFunc mu, ScalarFunc mu_prime,
                                 ScalarFunc lambda, ScalarFunc lambda_prime, double s_max,
                                 double r_max)
    : name_(std::move(name)),
      mu_(std::move(mu)),
      mu_prime_(std::move(mu_prime)),
      lambda_(std::move(lambda)),
      lambda_prime_(std::move(lambda_prime)),
      s_max_(s_max),
      r_max_(r_max) {
  if (!(s_max_ > 0.0) || !(r_max_ > 0.0))
    throw std::invalid_argument("law: scan domain must be finite and positive");
}

const EllipticityConstants& ConstitutiveLaw::constants() const {
  if (!constants_) throw std::logic_error("law '" + name_ + "' has not been certified");
  return *constants_;
}

namespace {

// mu + 2 s mu' and lambda + r lambda', with the exact s=0 / r=0 limits (the
// product s*mu'(s) vanishes there for any C^1 law).
double mu_comb(const ConstitutiveLaw& law, double s) {
  return law.mu(s) + (s > 0.0 ? 2.0 * s * law.mu_prime(s) : 0.0);
}
double lambda_comb(const ConstitutiveLaw& law, double r) {
  return law.lambda(r) + (r != 0.0 ? r * law.lambda_prime(r) : 0.0);
}

struct ScanMin {
  double value;
  double where;
};

template <typename F>
ScanMin scan_minimum(F&& f, double lo, double hi, int n_samples) {
  // uniform grid plus midpoint refinement
  const int total = 2 * n_samples - 1;
  ScanMin best{f(lo), lo};
  for (int i = 1; i < total; ++i) {
    const double x = lo + (hi - lo) * i / (total - 1);
    const double v = f(x);
    if (v < best.value) best = {v, x};
  }
  return best;
}

template <typename F, typename G>
double derivative_consistency(F&& f, G&& fp, double lo, double hi, int n_samples) {
  double worst = 0.0;
  const double h = (hi - lo) * 1e-6 + 1e-9;
  for (int i = 0; i <= n_samples; ++i) {
    double x = lo + (hi - lo) * i / n_samples;
    if (x - h < lo) x = lo + h;
    const double fd = (f(x + h) - f(x - h)) / (2.0 * h);
    const double scale = 1.0 + std::abs(fp(x));
    worst = std::max(worst, std::abs(fd - fp(x)) / scale);
  }
  return worst;
}

}  // namespace

CertifyReport certify(ConstitutiveLaw& law, int n_samples) {
  if (n_samples < 2) throw std::invalid_argument("certify: n_samples must be >= 2");
  CertifyReport rep;

  const auto m1 = scan_minimum([&](double s) { return law.mu(s); }, 0.0, law.s_max(), n_samples);
  const auto m2 = scan_minimum([&](double s) { return mu_comb(law, s); }, 0.0, law.s_max(), n_samples);
  const auto l1 =
      scan_minimum([&](double r) { return law.lambda(r); }, -law.r_max(), law.r_max(), n_samples);
  const auto l2 = scan_minimum([&](double r) { return lambda_comb(law, r); }, -law.r_max(),
                               law.r_max(), n_samples);

  rep.constants = {m1.value, m2.value, l1.value, l2.value};
  rep.mu_c1_error = derivative_consistency([&](double s) { return law.mu(s); },
                                           [&](double s) { return law.mu_prime(s); }, 0.0,
                                           law.s_max(), 64);
  rep.lambda_c1_error = derivative_consistency([&](double r) { return law.lambda(r); },
                                               [&](double r) { return law.lambda_prime(r); },
                                               -law.r_max(), law.r_max(), 64);

  const EllipticityConstants& e = rep.constants;
  if (!(e.eps_mu_1 > 0.0)) {
    rep.violation = "mu(s) > 0";
    rep.witness = m1.where;
  } else if (!(e.eps_mu_2 > 0.0)) {
    rep.violation = "mu(s) + 2 s mu'(s) > 0";
    rep.witness = m2.where;
  } else if (!(2.0 * e.eps_mu_1 + 3.0 * e.eps_lambda_1 > 0.0)) {
    rep.violation = "2 eps_mu_1 + 3 eps_lambda_1 > 0";
    rep.witness = l1.where;
  } else if (!(2.0 * e.eps_mu() + 3.0 * e.eps_lambda_2 > 0.0)) {
    rep.violation = "2 eps_mu + 3 eps_lambda_2 > 0";
    rep.witness = l2.where;
  } else {
    rep.passed = true;
  }
  law.constants_ = rep.constants;
  return rep;
}

std::array<double, 9> stress(const ConstitutiveLaw& law, const std::array<double, 9>& Du,
                             double divu, int d) {
  std::array<double, 9> S{};
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s += Du[i * 3 + j] * Du[i * 3 + j];
  const double two_mu = 2.0 * law.mu(s);
  const double lam = law.lambda(divu) * divu;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) S[i * 3 + j] = two_mu * Du[i * 3 + j] + (i == j ? lam : 0.0);
  return S;
}

namespace {

// |Du|^2 as a scalar field of samples
TorusField frobenius_sq(const TorusField& A) {
  TorusField out(A.grid(), Rank::Scalar);
  auto dst = out.values_mut(0);
  const std::size_t np = A.npoints();
  for (int c = 0; c < A.ncomp(); ++c) {
    auto a = A.values(c);
    for (std::size_t i = 0; i < np; ++i) dst[i] += a[i] * a[i];
  }
  return out;
}

TorusField apply_scalar(const ScalarFunc& f, const TorusField& s) {
  TorusField out(s.grid(), Rank::Scalar);
  auto src = s.values(0);
  auto dst = out.values_mut(0);
  for (std::size_t i = 0; i < s.npoints(); ++i) dst[i] = f(src[i]);
  return out;
}

}  // namespace

TorusField stress_field(const ConstitutiveLaw& law, const TorusField& u) {
  const TorusGrid& g = u.grid();
  const int d = g.d;
  const TorusField Du = sym_grad(u);
  const TorusField divu = divergence(u);
  const TorusField s = frobenius_sq(Du);
  TorusField out(g, Rank::Matrix);
  const std::size_t np = g.points();
  auto sv = s.values(0);
  auto dv = divu.values(0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      auto a = Du.values(i * d + j);
      auto dst = out.values_mut(i * d + j);
      for (std::size_t m = 0; m < np; ++m) {
        dst[m] = 2.0 * law.mu(sv[m]) * a[m];
        if (i == j) dst[m] += law.lambda(dv[m]) * dv[m];
      }
    }
  return dealias(out);
}

StressParts stress_parts(const TorusField& u) {
  if (u.rank() != Rank::Vector) throw std::invalid_argument("stress_parts: vector field expected");
  const TorusGrid& g = u.grid();
  const int d = g.d;
  const std::size_t np = g.points();

  StressParts parts;
  parts.Du = sym_grad(u);
  parts.divu = divergence(u);
  parts.s = frobenius_sq(parts.Du);
  parts.div_Du = divergence(parts.Du);
  parts.grad_div = grad(parts.divu);

  const TorusField gDu = grad(parts.Du);  // comp (a*d+b)*d+i = d_i Du_ab
  parts.chain = TorusField(g, Rank::Vector);
  for (int i = 0; i < d; ++i) {
    std::vector<double> inner(np, 0.0);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        auto t = gDu.values((a * d + b) * d + i);
        auto duv = parts.Du.values(a * d + b);
        for (std::size_t m = 0; m < np; ++m) inner[m] += t[m] * duv[m];
      }
    for (int j = 0; j < d; ++j) {
      auto dst = parts.chain.values_mut(j);
      auto duv = parts.Du.values(j * d + i);
      for (std::size_t m = 0; m < np; ++m) dst[m] += inner[m] * duv[m];
    }
  }
  return parts;
}

TorusField div_stress(const ConstitutiveLaw& law, const TorusField& u) {
  require_resolved(u);
  const TorusGrid& g = u.grid();
  const int d = g.d;
  const std::size_t np = g.points();
  const StressParts parts = stress_parts(u);

  auto sv = parts.s.values(0);
  auto dv = parts.divu.values(0);

  TorusField out(g, Rank::Vector);
  for (int j = 0; j < d; ++j) {
    auto dst = out.values_mut(j);
    auto t1 = parts.div_Du.values(j);
    auto t2 = parts.chain.values(j);
    auto t3 = parts.grad_div.values(j);
    for (std::size_t m = 0; m < np; ++m) {
      dst[m] = 2.0 * law.mu(sv[m]) * t1[m] + 4.0 * law.mu_prime(sv[m]) * t2[m] +
               (law.lambda(dv[m]) + law.lambda_prime(dv[m]) * dv[m]) * t3[m];
    }
  }
  return dealias(out);
}

double dissipation_potential(const ConstitutiveLaw& law, const TorusField& u) {
  using boost::math::quadrature::gauss_kronrod;
  const TorusField Du = sym_grad(u);
  const TorusField divu = divergence(u);
  const TorusField s = frobenius_sq(Du);
  auto sv = s.values(0);
  auto dv = divu.values(0);
  const std::size_t np = u.npoints();

  const auto antiderivative = [&](const ScalarFunc& f, double t) {
    if (t == 0.0) return 0.0;
    double err = 0.0;
    const double val =
        gauss_kronrod<double, 15>::integrate(f, 0.0, t, 12, 1e-14, &err);
    if (err > 1e-12 * (1.0 + std::abs(val)))
      throw QuadratureError("dissipation_potential: antiderivative quadrature did not converge");
    return val;
  };

  const ScalarFunc mu = [&law](double x) { return law.mu(x); };
  const ScalarFunc lam = [&law](double x) { return law.lambda(x); };
  double acc = 0.0;
  for (std::size_t m = 0; m < np; ++m)
    acc += antiderivative(mu, sv[m]) + 0.5 * antiderivative(lam, dv[m] * dv[m]);
  return acc * u.grid().cell_volume();
}

CoercivityGap coercivity_gap(const ConstitutiveLaw& law, const TorusField& u,
                             const TorusField& v) {
  const EllipticityConstants& eps = law.constants();
  const TorusGrid& g = u.grid();
  const int d = g.d;
  const std::size_t np = g.points();

  const TorusField Du = sym_grad(u);
  const TorusField Dv = sym_grad(v);
  const TorusField divu = divergence(u);
  const TorusField divv = divergence(v);
  const TorusField su = frobenius_sq(Du);
  const TorusField sv = frobenius_sq(Dv);
  const TorusField w = u - v;
  const TorusField gw = grad(w);
  const TorusField divw = divergence(w);

  auto suv = su.values(0);
  auto svv = sv.values(0);
  auto duv = divu.values(0);
  auto dvv = divv.values(0);

  // J via the integrated-by-parts form, evaluated pointwise on the grid
  double J = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      auto a = Du.values(i * d + j);
      auto b = Dv.values(i * d + j);
      auto gw_ij = gw.values(i * d + j);
      double s = 0.0;
      for (std::size_t m = 0; m < np; ++m) {
        double diff = 2.0 * (law.mu(suv[m]) * a[m] - law.mu(svv[m]) * b[m]);
        if (i == j) diff += law.lambda(duv[m]) * duv[m] - law.lambda(dvv[m]) * dvv[m];
        s += diff * gw_ij[m];
      }
      J += s;
    }
  J *= g.cell_volume();

  const double gn = norm_l2(gw);
  const double dn = norm_l2(divw);
  CoercivityGap out;
  out.J = J;
  out.bound = eps.eps_mu() * gn * gn + (eps.eps_mu() + eps.eps_lambda_2) * dn * dn;
  return out;
}

TorusField pressure_of(const PressureLaw& pl, const TorusField& rho) {
  return apply_scalar(pl.p, rho);
}

namespace {

double param_or(const std::map<std::string, double>& p, const std::string& key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

}  // namespace

ConstitutiveLaw make_law(const LawSpec& spec) {
  if (spec.name == "newtonian") {
    const double mu0 = param_or(spec.params, "mu", 1.0);
    const double lam0 = param_or(spec.params, "lambda", 0.0);
    return {"newtonian",
            [mu0](double) { return mu0; },
            [](double) { return 0.0; },
            [lam0](double) { return lam0; },
            [](double) { return 0.0; },
            spec.s_max,
            spec.r_max};
  }
  if (spec.name == "power_law") {
    const double mu0 = param_or(spec.params, "mu0", 1.0);
    const double coef = param_or(spec.params, "coef", 1.0);
    const double expo = param_or(spec.params, "exponent", 1.0);
    const double lam0 = param_or(spec.params, "lambda0", 0.0);
    const double lam1 = param_or(spec.params, "lambda_slope", 0.0);
    if (!(expo >= 1.0))
      throw std::invalid_argument("power_law: exponent must be >= 1 (C1 at s = 0)");
    return {"power_law",
            [mu0, coef, expo](double s) { return mu0 + coef * std::pow(s, expo); },
            [coef, expo](double s) {
              return expo == 1.0 ? coef : coef * expo * std::pow(s, expo - 1.0);
            },
            [lam0, lam1](double r) { return lam0 + lam1 * r; },
            [lam1](double) { return lam1; },
            spec.s_max,
            spec.r_max};
  }
  if (spec.name == "p_delta") {
    const double delta = param_or(spec.params, "delta", 0.1);
    const double p = param_or(spec.params, "p", 4.0);
    if (!(p >= 4.0))
      throw std::invalid_argument("p_delta: p >= 4 supported (smaller p makes mu' singular at 0)");
    const double e = 0.5 * (p - 2.0);
    return {"p_delta",
            [delta, e](double s) { return delta + std::pow(s, e); },
            [e](double s) { return e == 1.0 ? 1.0 : e * std::pow(s, e - 1.0); },
            [](double) { return 0.0; },
            [](double) { return 0.0; },
            spec.s_max,
            spec.r_max};
  }
  if (spec.name == "table") {
    if (spec.table.size() < 4)
      throw std::invalid_argument("table law: need at least 4 (s, mu) samples");
    std::vector<double> xs, ys;
    xs.reserve(spec.table.size());
    ys.reserve(spec.table.size());
    for (auto& [s, m] : spec.table) {
      xs.push_back(s);
      ys.push_back(m);
    }
    using boost::math::interpolators::pchip;
    auto interp = std::make_shared<pchip<std::vector<double>>>(std::move(xs), std::move(ys));
    const double lo = spec.table.front().first;
    const double hi = spec.table.back().first;
    const double lam0 = param_or(spec.params, "lambda0", 0.0);
    // clamp with linear extension beyond the sampled range
    auto eval = [interp, lo, hi](double s) {
      if (s < lo) return (*interp)(lo) + interp->prime(lo) * (s - lo);
      if (s > hi) return (*interp)(hi) + interp->prime(hi) * (s - hi);
      return (*interp)(s);
    };
    auto eval_prime = [interp, lo, hi](double s) {
      return interp->prime(s < lo ? lo : (s > hi ? hi : s));
    };
    return {"table",
            eval,
            eval_prime,
            [lam0](double) { return lam0; },
            [](double) { return 0.0; },
            spec.s_max,
            spec.r_max};
  }
  throw std::invalid_argument("unknown constitutive law '" + spec.name + "'");
}

PressureLaw make_pressure(const PressureSpec& spec) {
  if (spec.name == "constant") {
    const double v = param_or(spec.params, "value", 1.0);
    if (v < 0.0) throw std::invalid_argument("pressure: value must be >= 0");
    return {"constant", [v](double) { return v; }, [](double) { return 0.0; }};
  }
  if (spec.name == "linear") {
    const double K = param_or(spec.params, "K", 1.0);
    if (K < 0.0) throw std::invalid_argument("pressure: K must be >= 0");
    return {"linear", [K](double r) { return K * r; }, [K](double) { return K; }};
  }
  if (spec.name == "gamma") {
    const double K = param_or(spec.params, "K", 1.0);
    const double gamma = param_or(spec.params, "gamma", 1.4);
    if (K < 0.0 || gamma < 1.0)
      throw std::invalid_argument("pressure: need K >= 0 and gamma >= 1");
    return {"gamma", [K, gamma](double r) { return K * std::pow(std::max(r, 0.0), gamma); },
            [K, gamma](double r) {
              return r <= 0.0 && gamma < 2.0 && gamma != 1.0
                         ? 0.0
                         : K * gamma * std::pow(std::max(r, 0.0), gamma - 1.0);
            }};
  }
  throw std::invalid_argument("unknown pressure law '" + spec.name + "'");
}

}  // namespace torusns
