#pragma once

#include <vector>

#include "rslab/types.hpp"

namespace rslab {

// Principal-branch log Gamma(z).  Stirling with Bernoulli corrections,
// pushed right by upward recurrence for small |z|; reflection for
// Re z < 1/2.  Throws at non-positive integers.
Complex log_gamma(Complex z);
Real log_gamma(Real x);

// Riemann zeta via Euler-Maclaurin; valid for any s != 1 needed here.
Complex riemann_zeta(Complex s);
Real riemann_zeta(Real s);

// Completed zeta xi(s) = pi^{-s/2} Gamma(s/2) zeta(s); s != 0, 1.
Real completed_zeta(Real s);
Complex completed_zeta(Complex s);

// Ascending-series J_nu(x).  Accurate for x up to ~25 (cancellation
// guard throws beyond the series budget).
Real bessel_j_series(Real nu, Real x, int prec_bits = 64);

// Mellin-Barnes evaluation of J_nu(x) along Re s = sigma, 0 < sigma < nu.
Real bessel_j_mellin_barnes(Real nu, Real x, Real sigma, int prec_bits = 48);

// Integer-order J_n(x) for production sums: series / Miller downward
// recurrence / forward recurrence from asymptotic J_0, J_1 depending on
// the (n, x) regime.
Real bessel_j(int n, Real x);

// K_nu(x) via the cosh integral with trapezoidal quadrature; x > 0.
// The complex-order overload serves K_{s-1/2} off the real axis.
Real bessel_k(Real nu, Real x, int prec_bits = 64);
Complex bessel_k(Complex nu, Real x, int prec_bits = 64);

// Parameters for the V_{1/2} contour integral: a weight vector (one
// entry per archimedean place), the contour abscissa, and quadrature
// truncation/step.
struct VProfile {
  std::vector<int> weights;        // even integers >= 4
  Real contour_abscissa = 1.5L;
  Real truncation_height = 0.0L;   // 0 -> derived from target_precision
  Real step = 0.0625L;
  int target_precision = 64;

  void validate() const;  // throws on invariant violation
};

VProfile make_vprofile(std::vector<int> weights, int prec_bits = 64);

// V_{1/2}(y) = (1/2*pi*i) Int y^-u e^{u^2}
//   prod_j Gamma(1/2+u)Gamma(k_j-1/2+u) / (Gamma(1/2)Gamma(k_j-1/2)) du/u.
Real v_half(Real y, const VProfile& profile);

// Cached contour data for I(w, y) = (1/2*pi*i) Int y^-u e^{u^2}
//   Gamma(w+u) Gamma(w+k-1+u) du/u
// at fixed (k, w, sigma); evaluations at many y reuse the Gamma nodes.
// This is the smoothed kernel of the approximate functional equation:
// v_half is I(1/2, y) / (Gamma(1/2) Gamma(k-1/2)) for a length-1 weight
// vector.  test_scale c replaces the smoothing factor e^{u^2} by
// e^{c u^2} (the truncation height is re-derived accordingly).
class AfeKernel {
 public:
  AfeKernel(int weight, Real base, Real sigma, int prec_bits = 64,
            Real step = 0.0625L, Real test_scale = 1.0L);

  Real operator()(Real y) const;

  // sup_{t} bound factor: |I(w,y)| <= y^-sigma * node_mass_; used for
  // rigorous tail truncation of coefficient sums.
  Real tail_bound(Real y) const { return std::pow(y, -sigma_) * node_mass_; }

  Real sigma() const { return sigma_; }

 private:
  Real sigma_;
  Real step_;
  std::vector<Real> heights_;       // t >= 0
  std::vector<Complex> node_weight_;  // e^{u^2} Gamma Gamma / u * h/(2 pi)
  Real node_mass_ = 0.0L;
};

}  // namespace rslab
