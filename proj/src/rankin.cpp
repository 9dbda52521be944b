#include "rslab/rankin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rslab/arith.hpp"

namespace rslab {

namespace {

int effective_limit(const RSContext& ctx) {
  int avail = std::min(ctx.f.coeff_limit(), ctx.g.coeff_limit());
  if (ctx.coeff_limit <= 0) return avail;
  if (ctx.coeff_limit > avail)
    throw std::invalid_argument(
        "rankin: coeff_limit exceeds the stored eigenvalue range");
  return ctx.coeff_limit;
}

// Tail of the cutoff sum past J, sized from the measured kernel: V is
// positive and decreasing in this regime, decaying faster than any
// fixed power, so  sum_{j>J} d3(j) j^{-1/2} V(4 pi^2 j)  is dominated
// by a short range past J; the sqrt(J) factor absorbs the divisor
// density with an order-of-magnitude safety margin (checked against
// direct differences in the stability tests).
Real tail_estimate_at(const AfeKernel& kernel, Real log_norm, long j) {
  Real y = 4.0L * kPi * kPi * Real(j);
  Real v = std::fabs(kernel(y)) * std::exp(-log_norm);
  return 9.0L * std::sqrt(Real(j)) * v;
}

// log G(w) with G(w) = (2 pi)^{-2w} Gamma(w) Gamma(w + k - 1).
Real log_gamma_factor(int weight, Real w) {
  return -2.0L * w * std::log(kTwoPi) + log_gamma(w) +
         log_gamma(w + Real(weight) - 1.0L);
}

Complex divisor_sigma(long m, Complex w) {
  Complex total = 0.0L;
  for (long d = 1; d * d <= m; ++d) {
    if (m % d) continue;
    total += std::exp(w * std::log(Real(d)));
    long e = m / d;
    if (e != d) total += std::exp(w * std::log(Real(e)));
  }
  return total;
}

}  // namespace

void RSContext::validate() const {
  if (f.weight != g.weight)
    throw std::invalid_argument("RSContext: the two weights must agree");
  if (f.weight < 12 || f.weight % 2)
    throw std::invalid_argument("RSContext: weight must be even and >= 12");
  if (level_norm != 1)
    throw std::invalid_argument("RSContext: only level norm 1 is wired up");
  if (f.coeff_limit() < 1 || g.coeff_limit() < 1)
    throw std::invalid_argument("RSContext: forms carry no coefficients");
  effective_limit(*this);
  vprofile.validate();
}

RSContext make_rs_context(const Eigenform& f, const Eigenform& g,
                          int coeff_limit, int prec_bits) {
  RSContext ctx;
  ctx.f = f;
  ctx.g = g;
  ctx.coeff_limit = coeff_limit;
  ctx.precision = prec_bits;
  ctx.vprofile = make_vprofile({f.weight}, prec_bits);
  ctx.validate();
  return ctx;
}

std::vector<Real> rs_dirichlet_coefficients(const RSContext& ctx) {
  int limit = effective_limit(ctx);
  std::vector<Real> b(limit + 1, 0.0L);
  for (long d = 1; d * d <= limit; ++d) {
    for (long e = 1; d * d * e <= limit; ++e) {
      b[d * d * e] += ctx.f.normalized[e] * ctx.g.normalized[e];
    }
  }
  return b;
}

long central_value_terms(int weight, const AfeOptions& opt) {
  AfeKernel kernel(weight, 0.5L, opt.contour_sigma, 64, 0.0625L,
                   opt.test_scale);
  Real log_norm = log_gamma(0.5L) + log_gamma(Real(weight) - 0.5L);
  long j = 16;
  while (tail_estimate_at(kernel, log_norm, j) >= opt.tail_tolerance) {
    j = (long)(j * 1.05L) + 1;
    if (j > 2000000)
      throw std::runtime_error("central_value_terms: cutoff out of range");
  }
  return (long)std::ceil(Real(j) * opt.t_cut_scale);
}

CentralValueDetail central_value_detail(const RSContext& ctx,
                                        const AfeOptions& opt) {
  ctx.validate();
  int k = ctx.weight();
  long terms = central_value_terms(k, opt);
  int avail = effective_limit(ctx);
  if (terms > avail)
    throw std::runtime_error(
        "central_value: coefficient range too small, need " +
        std::to_string(terms) + " coefficients");
  RSContext local = ctx;
  local.coeff_limit = (int)terms;
  std::vector<Real> b = rs_dirichlet_coefficients(local);
  AfeKernel kernel(k, 0.5L, opt.contour_sigma, ctx.precision, 0.0625L,
                   opt.test_scale);
  Real log_norm = log_gamma(0.5L) + log_gamma(Real(k) - 0.5L);
  Real total = 0.0L;
  for (long j = 1; j <= terms; ++j) {
    if (b[j] == 0.0L) continue;
    Real y = 4.0L * kPi * kPi * Real(j);
    total += b[j] / std::sqrt(Real(j)) * kernel(y) * std::exp(-log_norm);
  }
  CentralValueDetail out;
  out.value = 2.0L * total;
  out.tail_estimate = 2.0L * tail_estimate_at(kernel, log_norm, terms);
  out.terms = terms;
  return out;
}

Real central_value(const RSContext& ctx, const AfeOptions& opt) {
  return central_value_detail(ctx, opt).value;
}

Real rs_residue(const Eigenform& f) {
  if (!(f.petersson_norm > 0.0L))
    throw std::runtime_error("rs_residue: petersson_norm not attached");
  int k = f.weight;
  return std::exp(Real(k) * std::log(4.0L * kPi) - log_gamma(Real(k))) *
         riemann_zeta(2.0L) * f.petersson_norm;
}

Real central_l_value(const RSContext& ctx, const AfeOptions& opt) {
  Real bare = central_value(ctx, opt);
  if (!ctx.diagonal()) return bare;
  Real pole_factor =
      std::exp(log_gamma_factor(ctx.weight(), 1.0L) -
               log_gamma_factor(ctx.weight(), 0.5L)) *
      rs_residue(ctx.f);
  return bare - 4.0L * pole_factor * std::exp(0.25L * opt.test_scale);
}

Real rs_l_value(const RSContext& ctx, Real s) {
  ctx.validate();
  if (!(s > 1.0L && s <= 2.0L))
    throw std::invalid_argument("rs_l_value: s must lie in (1, 2]");
  std::vector<Real> b = rs_dirichlet_coefficients(ctx);
  long limit = (long)b.size() - 1;
  long window_lo = limit / 2;
  Real residue = ctx.diagonal() ? rs_residue(ctx.f) : 0.0L;
  Real zeta_s = riemann_zeta(s);
  Real partial = 0.0L, zeta_partial = 0.0L, acc = 0.0L;
  long count = 0;
  for (long j = 1; j <= limit; ++j) {
    Real js = std::exp(-s * std::log(Real(j)));
    partial += b[j] * js;
    zeta_partial += js;
    if (j > window_lo) {
      acc += partial + residue * (zeta_s - zeta_partial);
      ++count;
    }
  }
  return acc / Real(count);
}

Real rs_l_value_dirichlet(const RSContext& ctx, Real s, long x_limit) {
  ctx.validate();
  if (x_limit < 1) throw std::invalid_argument("rs_l_value_dirichlet: X >= 1");
  RSContext local = ctx;
  local.coeff_limit = (int)std::min<long>(x_limit, effective_limit(ctx));
  if (local.coeff_limit < x_limit)
    throw std::invalid_argument(
        "rs_l_value_dirichlet: X exceeds the coefficient range");
  std::vector<Real> b = rs_dirichlet_coefficients(local);
  Real partial = 0.0L, zeta_partial = 0.0L;
  for (long j = 1; j <= x_limit; ++j) {
    Real js = std::exp(-s * std::log(Real(j)));
    partial += b[j] * js;
    zeta_partial += js;
  }
  Real residue = ctx.diagonal() ? rs_residue(ctx.f) : 0.0L;
  return partial + residue * (riemann_zeta(s) - zeta_partial);
}

ShimuraCheck shimura_residue_check(const Eigenform& f,
                                   const std::vector<long>& x_grid) {
  if (x_grid.size() < 2)
    throw std::invalid_argument("shimura_residue_check: need >= 2 grid points");
  long x_max = *std::max_element(x_grid.begin(), x_grid.end());
  RSContext ctx = make_rs_context(f, f, (int)x_max);
  std::vector<Real> b = rs_dirichlet_coefficients(ctx);
  std::vector<Real> partial(x_max + 1, 0.0L);
  for (long j = 1; j <= x_max; ++j) partial[j] = partial[j - 1] + b[j];
  // Two-parameter least squares S(X) = slope X + intercept.
  Real n = 0.0L, sx = 0.0L, sy = 0.0L, sxx = 0.0L, sxy = 0.0L;
  for (long x : x_grid) {
    if (x < 1 || x > x_max)
      throw std::invalid_argument("shimura_residue_check: bad grid point");
    Real fx = Real(x), fy = partial[x];
    n += 1.0L;
    sx += fx;
    sy += fy;
    sxx += fx * fx;
    sxy += fx * fy;
  }
  ShimuraCheck out;
  out.residue_estimate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  out.formula_value = rs_residue(f);
  out.relative_gap =
      std::fabs(out.residue_estimate - out.formula_value) / out.formula_value;
  return out;
}

Complex eisenstein_value(Complex z, Complex s, const EisensteinSeries& series) {
  Real y = z.imag();
  Real x = z.real();
  if (!(y > 0.0L))
    throw std::invalid_argument("eisenstein_value: need Im z > 0");
  int terms = series.truncation;
  if (terms <= 0)
    terms = std::max(4, (int)std::ceil(60.0L / (kTwoPi * y)));
  bool at_half = std::abs(s - Complex(0.5L)) < 1e-9L;
  Complex value;
  if (at_half) {
    // Joint limit of the two constant terms across the cancelling
    // poles: symmetric average at radius h kills the odd orders, one
    // Richardson step removes the h^2 term.
    auto constant_pair = [&](Real w) {
      return completed_zeta(2.0L * w) * std::pow(y, w) +
             completed_zeta(2.0L * w - 1.0L) * std::pow(y, 1.0L - w);
    };
    auto symmetric = [&](Real h) {
      return 0.5L * (constant_pair(0.5L + h) + constant_pair(0.5L - h));
    };
    Real h = 1e-3L;
    Real coarse = symmetric(h), fine = symmetric(0.5L * h);
    value = (4.0L * fine - coarse) / 3.0L;
    Real root_y = std::sqrt(y);
    for (long m = 1; m <= terms; ++m) {
      value += 4.0L * root_y * Real(divisor_count(m)) *
               bessel_k(0.0L, kTwoPi * m * y) * std::cos(kTwoPi * m * x);
    }
  } else {
    Real log_y = std::log(y);
    value = completed_zeta(2.0L * s) * std::exp(s * log_y) +
            completed_zeta(2.0L * s - Complex(1.0L)) *
                std::exp((Complex(1.0L) - s) * log_y);
    Real root_y = std::sqrt(y);
    Complex nu = s - Complex(0.5L);
    for (long m = 1; m <= terms; ++m) {
      value += 4.0L * root_y * std::exp(nu * std::log(Real(m))) *
               divisor_sigma(m, Complex(1.0L) - 2.0L * s) *
               bessel_k(nu, kTwoPi * m * y) * std::cos(kTwoPi * m * x);
    }
  }
  if (!series.completed)
    value /= std::exp(-s * std::log(kPi) + log_gamma(s));
  return value;
}

Complex eigenform_value(const Eigenform& f, Complex z) {
  Real y = z.imag();
  if (!(y > 0.0L))
    throw std::invalid_argument("eigenform_value: need Im z > 0");
  int limit = f.coeff_limit();
  // |a(m)| <= 2 tau(m) m^{(k-1)/2}; cut when the bound falls 1e-24
  // below the leading term's scale.
  Real rate = kTwoPi * y;
  int terms = 1;
  for (int m = 2; m <= limit; ++m) {
    Real log_bound = 0.5L * (f.weight + 1) * std::log(Real(m)) - rate * m;
    if (log_bound > -rate - 56.0L) terms = m;
  }
  Complex q = std::exp(Complex(0.0L, kTwoPi) * z);
  Complex value = 0.0L;
  for (int m = terms; m >= 1; --m) value = (value + f.raw_coeffs[m]) * q;
  return value;
}

UnfoldReport unfold_identity_check(const Eigenform& f, const Eigenform& g,
                                   Real s, Real tolerance) {
  if (!(s > 1.0L && s <= 2.0L))
    throw std::invalid_argument("unfold_identity_check: s must be in (1, 2]");
  if (!(tolerance > 0.0L))
    throw std::invalid_argument("unfold_identity_check: tolerance > 0");
  RSContext ctx = make_rs_context(f, g);
  int k = f.weight;
  Real l_value = rs_l_value(ctx, s);
  Real rhs = std::exp((1.0L - s - k) * std::log(4.0L * kPi) +
                      log_gamma(s + Real(k) - 1.0L)) *
             l_value / kModularCovolume;
  EisensteinSeries cfg;
  cfg.s = Complex(s, 0.0L);
  cfg.completed = false;
  auto integrand = [&](Real xx, Real yy) -> Real {
    Complex z(xx, yy);
    Complex fv = eigenform_value(f, z);
    Complex gv = eigenform_value(g, z);
    Real e_val = eisenstein_value(z, cfg.s, cfg).real();
    return (fv * std::conj(gv)).real() * e_val *
           std::pow(yy, Real(k - 2));
  };
  Real y_max = 8.0L + Real(k) / 8.0L;
  Real prev = 0.0L;
  Real lhs = 0.0L;
  bool converged = false;
  for (int nx = 24, ny = 16, round = 0; round < 4; nx *= 2, ny *= 2, ++round) {
    Real value = fundamental_domain_integral(integrand, y_max, nx, ny) /
                 kModularCovolume;
    if (round > 0 &&
        std::fabs(value - prev) <= 0.25L * tolerance * std::fabs(value)) {
      lhs = value;
      converged = true;
      break;
    }
    prev = value;
    lhs = value;
  }
  if (!converged)
    throw std::runtime_error("unfold_identity_check: quadrature stalled");
  UnfoldReport out;
  out.lhs = lhs;
  out.rhs = rhs;
  out.relative_gap = std::fabs(lhs - rhs) / std::fabs(rhs);
  return out;
}

std::string central_value_csv(const std::vector<RSContext>& contexts,
                              const AfeOptions& opt) {
  std::string out = "k,f_index,g_index,central_value,afe_error_estimate\n";
  char line[160];
  for (const auto& ctx : contexts) {
    CentralValueDetail detail = central_value_detail(ctx, opt);
    std::snprintf(line, sizeof line, "%d,%d,%d,%.21Le,%.6Le\n", ctx.weight(),
                  ctx.f.eigenvalue_index, ctx.g.eigenvalue_index, detail.value,
                  detail.tail_estimate);
    out += line;
  }
  return out;
}

}  // namespace rslab
