#pragma once

#include <string>
#include <vector>

#include "rslab/modforms.hpp"
#include "rslab/specfun.hpp"
#include "rslab/types.hpp"

namespace rslab {

// Convolution L-series data for a pair of weight-k level-one
// eigenforms.  level_norm is the conductor-type factor, fixed to 1
// here; coeff_limit caps the Dirichlet coefficients b_j in play.
struct RSContext {
  Eigenform f;
  Eigenform g;
  long level_norm = 1;
  int coeff_limit = 0;  // 0 -> min of the two forms' ranges
  VProfile vprofile;
  int precision = 64;

  int weight() const { return f.weight; }
  bool diagonal() const {
    return f.weight == g.weight && f.eigenvalue_index == g.eigenvalue_index;
  }
  void validate() const;  // throws on weight mismatch etc.
};

RSContext make_rs_context(const Eigenform& f, const Eigenform& g,
                          int coeff_limit = 0, int prec_bits = 64);

// Coefficients b_0..b_J (b_0 = 0) of L(s, f x g) = sum b_j j^{-s},
//   b_j = sum_{d^2 e = j} lambda_f(e) lambda_g(e)
// (level one: every d contributes with unit coefficient).
std::vector<Real> rs_dirichlet_coefficients(const RSContext& ctx);

// Tuning knobs for the smoothed (contour-kernel) evaluations.  The
// defaults reproduce the production path; the alternates exist so the
// stability checks can move the contour, rescale the cutoff, and swap
// the smoothing factor e^{u^2} -> e^{c u^2}.
struct AfeOptions {
  Real contour_sigma = 1.5L;
  Real tail_tolerance = 1e-8L;
  Real t_cut_scale = 1.0L;
  Real test_scale = 1.0L;
};

// Smallest coefficient range that brings the kernel tail below
// tail_tolerance for the given weight.
long central_value_terms(int weight, const AfeOptions& opt = {});

struct CentralValueDetail {
  Real value = 0.0L;
  Real tail_estimate = 0.0L;
  long terms = 0;
};

// L(1/2, f x g) = 2 sum_j (b_j / sqrt(j)) V_{1/2}(4 pi^2 j), summed in
// increasing j and truncated once the kernel decay bound drops below
// tail_tolerance.  Throws (reporting the required range) when
// coeff_limit cannot reach the cutoff.
Real central_value(const RSContext& ctx, const AfeOptions& opt = {});
CentralValueDetail central_value_detail(const RSContext& ctx,
                                        const AfeOptions& opt = {});

// True central value: the bare sum minus the explicit pole
// contribution picked up by the smoothing factor on the diagonal,
//   L(1/2) = central_value - 4 (G(1)/G(1/2)) r e^{c/4},
// G(w) = (2 pi)^{-2w} Gamma(w) Gamma(w+k-1), c the test scale, r the
// residue of L(s, f x f) at s = 1 (zero off the diagonal, where the
// two values coincide).  Invariant under every AfeOptions knob.
Real central_l_value(const RSContext& ctx, const AfeOptions& opt = {});

// L(s, f x g) for real s in (1, 2], inside the region where the
// Dirichlet series converges: partial sums with the pole compensated
// through zeta,
//   sum_{j<=X} b_j j^{-s} + r (zeta(s) - sum_{j<=X} j^{-s}),
// averaged over X in [limit/2, limit] to damp the oscillating
// remainder; r is the residue at s = 1 (zero off the diagonal).
Real rs_l_value(const RSContext& ctx, Real s);

// Single-cutoff variant of the same sum; kept as an independent
// cross-check oracle for the window average.
Real rs_l_value_dirichlet(const RSContext& ctx, Real s, long x_limit);

// Residue of L(s, f x f) at s = 1 by the closed formula
// (4 pi)^k zeta(2) Gamma(k)^{-1} <f,f>; requires the attached norm.
Real rs_residue(const Eigenform& f);

struct ShimuraCheck {
  Real residue_estimate = 0.0L;  // least-squares slope of sum_{j<=X} b_j
  Real formula_value = 0.0L;
  Real relative_gap = 0.0L;
};

// Compare the empirical linear growth of the coefficient partial sums
// against the closed residue formula on the given X grid.
ShimuraCheck shimura_residue_check(const Eigenform& f,
                                   const std::vector<long>& x_grid);

// Real-analytic Eisenstein series configuration.  truncation <= 0
// derives the Fourier cutoff from the evaluation height; completed
// selects E* = pi^{-s} Gamma(s) E.
struct EisensteinSeries {
  Complex s = Complex(1.5L, 0.0L);
  int truncation = 0;
  bool completed = true;
};

// Fourier-expansion evaluation
//   E*(z,s) = xi(2s) y^s + xi(2s-1) y^{1-s}
//           + 4 sqrt(y) sum_m m^{s-1/2} sigma_{1-2s}(m)
//                        K_{s-1/2}(2 pi m y) cos(2 pi m x);
// at s = 1/2 the two constant terms are evaluated jointly through the
// pole-cancelled symmetric limit (radius 1e-3, one Richardson step).
Complex eisenstein_value(Complex z, Complex s, const EisensteinSeries& series);

struct UnfoldReport {
  Real lhs = 0.0L;
  Real rhs = 0.0L;
  Real relative_gap = 0.0L;
};

// Both sides of the unfolding identity
//   (1/M) Int_F f(z) g(z) E(z,s) y^k dmu = M^{-1} (4 pi)^{1-s-k}
//                                          Gamma(s+k-1) L(s, f x g),
// M = pi/3, for real s in (1, 2].  The quadrature doubles its nodes
// until consecutive values agree to tolerance / 4 and throws if that
// never happens.
UnfoldReport unfold_identity_check(const Eigenform& f, const Eigenform& g,
                                   Real s, Real tolerance);

// Truncated holomorphic q-expansion value from the stored coefficients.
Complex eigenform_value(const Eigenform& f, Complex z);

// CSV rows (k, f_index, g_index, central_value, afe_error_estimate).
std::string central_value_csv(const std::vector<RSContext>& contexts,
                              const AfeOptions& opt = {});

}  // namespace rslab
