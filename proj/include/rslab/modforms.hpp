#pragma once

#include <gmpxx.h>

#include <functional>
#include <string>
#include <vector>

#include "rslab/types.hpp"

namespace rslab {

// Truncated q-expansion of a level-one form with exact rational
// coefficients c_0..c_order.
struct QExpansion {
  int weight = 0;
  std::vector<mpq_class> coeffs;

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
  const mpq_class& operator[](int n) const { return coeffs.at(n); }
};

// Ring operations: addition requires equal weights; multiplication adds
// weights; both truncate to the smaller order.
QExpansion qexp_add(const QExpansion& a, const QExpansion& b);
QExpansion qexp_mul(const QExpansion& a, const QExpansion& b);

// E_4 = 1 + 240 sum sigma_3(n) q^n, E_6 = 1 - 504 sum sigma_5(n) q^n.
QExpansion eisenstein_series(int weight, int order);

// Delta = q prod (1-q^n)^24, exact integer coefficients.
QExpansion delta_series(int order);

// dim S_k(SL_2(Z)) for even k >= 4 (0 below weight 12 and at 14).
int cusp_dim(int weight);

// Echelon basis g_1..g_d of S_k with g_i = q^i + O(q^{d+1}), assembled
// from Delta^i E_4^a E_6^b monomials by exact row reduction.
std::vector<QExpansion> miller_basis(int weight, int order);

using RationalMatrix = std::vector<std::vector<mpq_class>>;

// Matrix of T_m in the Miller basis, exact.  Requires basis order
// >= m * (dim + 1).
RationalMatrix hecke_matrix(int weight, const std::vector<QExpansion>& basis,
                            int index);

struct Eigenform {
  int weight = 0;
  int eigenvalue_index = 0;          // position in ascending T_2 order
  std::vector<Real> raw_coeffs;      // a(m), m <= M; a(0) = 0, a(1) = 1
  std::vector<Real> normalized;      // lambda(m) = a(m) / m^{(k-1)/2}
  Real petersson_norm = 0.0L;        // covolume-normalized <f,f>; 0 = unset
  Real harmonic_weight = 0.0L;       // 0 = unset

  int coeff_limit() const { return static_cast<int>(raw_coeffs.size()) - 1; }
};

// All dim S_k normalized Hecke eigenforms with coefficients up to
// coeff_limit.  T_2 eigenvalues come from the exact characteristic
// polynomial via Sturm isolation, refined to working precision; a
// repeated eigenvalue is broken by mixing in T_3 and T_5, and an
// unseparated system is reported as an error.
std::vector<Eigenform> eigenforms(int weight, int coeff_limit,
                                  int prec_bits = 64);

// Integral over the standard fundamental domain {|x| <= 1/2, |z| >= 1}
// truncated at y <= y_max, for integrands even in x (all integrands in
// this project are).  The y-integral runs over Gauss-Legendre panels;
// doubling both node counts must reproduce the value to the caller's
// tolerance (checked by callers).
Real fundamental_domain_integral(const std::function<Real(Real, Real)>& fn,
                                 Real y_max, int x_nodes, int y_nodes);

// <f,f> = (1/vol) Int_F |f|^2 y^k dmu, vol = pi/3, by adaptive
// quadrature with node doubling until the change is below tolerance.
Real petersson_norm(const Eigenform& form, Real tolerance);

// omega_f = Gamma(k-1) / ((4 pi)^{k-1} <f,f>), with <f,f> normalized by
// the covolume.  Requires petersson_norm to be attached.
Real harmonic_weight(const Eigenform& form);

// Compute and attach petersson_norm and harmonic_weight on each form.
void attach_norms(std::vector<Eigenform>& forms, Real tolerance);

// JSON cache round trip; decimal text carries the full working
// precision of Real.
void save_eigenforms(const std::string& path,
                     const std::vector<Eigenform>& forms, int prec_bits);
std::vector<Eigenform> load_eigenforms(const std::string& path);

// Gauss-Legendre nodes and weights on [-1, 1], cached per n.
struct GaussRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};
const GaussRule& gauss_legendre(int n);

// Exact big integer -> Real with full 64-bit mantissa precision.
Real mpz_to_real(const mpz_class& z);

}  // namespace rslab
