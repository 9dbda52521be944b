#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>
#include <vector>

#include "rslab/types.hpp"

namespace rslab {

// Element a + b*omega of the ring of integers of Q(sqrt(D)),
// D = 1 mod 4, omega = (1 + sqrt(D))/2.
struct QFElem {
  mpz_class a, b;

  bool operator==(const QFElem&) const = default;
};

// Real quadratic field Q(sqrt(D)) with narrow class number 1.  Only
// D = 1 mod 4 is wired up (the acceptance sweeps use D = 5); the
// integral basis is (1, omega).
struct QuadraticField {
  long disc = 5;                 // squarefree D
  long omega_sq_const = 1;       // q in omega^2 = omega + q, q = (D-1)/4
  QFElem fundamental_unit;       // eps_0, norm +-1
  QFElem tp_unit_generator;      // generator of totally positive units mod +-1
  QFElem different_gen;          // sqrt(D) = 2 omega - 1
  int narrow_class_number = 1;
  int unit_index = 1;            // [O^{x+} : O^{x2}]

  Real sqrt_disc() const;
};

QuadraticField make_field(long squarefree_d);

QFElem qf_add(const QuadraticField& F, const QFElem& x, const QFElem& y);
QFElem qf_mul(const QuadraticField& F, const QFElem& x, const QFElem& y);
QFElem qf_conj(const QuadraticField& F, const QFElem& x);
mpz_class qf_norm(const QuadraticField& F, const QFElem& x);
mpz_class qf_trace(const QuadraticField& F, const QFElem& x);
// (sigma_1(x), sigma_2(x)) with sigma_1 the embedding sending sqrt(D)
// to the positive root.
std::pair<Real, Real> qf_embed(const QuadraticField& F, const QFElem& x);
bool qf_totally_positive(const QuadraticField& F, const QFElem& x);
QFElem qf_pow(const QuadraticField& F, const QFElem& x, long e);  // e >= 0
// Inverse of a unit (|norm| = 1 required).
QFElem qf_unit_inverse(const QuadraticField& F, const QFElem& u);

struct KloostermanQuery {
  QuadraticField field;
  QFElem alpha;
  QFElem modulus_c;
  QFElem unit_eta{1, 0};
};

// Classical sum S(m, n; c) over Z; the imaginary part is asserted to
// vanish to precision.
Real kloosterman_z(long m, long n, long c);

// Kl(alpha, O; 1, O; c eta^{-1}, O) over the field: the residues
// x = xi / sqrt(D) run through (O/c)^x via the integer lattice, with
// exact rational traces
//   Tr((alpha x + xbar)/(c/eta)) = (v1 + D v2) / N(c),
// v1, v2 the omega-coordinates of eta alpha xi conj(c) and of
// eta xi^{-1} conj(c).
Complex kloosterman_nf(const KloostermanQuery& query);

// x^{-1} mod (c) by extended-gcd column reduction of the 2x4 system
// [mult-by-x | lattice of (c)]; empty return = not invertible.
bool qf_invert_mod(const QuadraticField& F, const QFElem& x, const QFElem& c,
                   QFElem* inverse);

// Number of integral ideals containing (c), i.e. tau of the principal
// ideal, via prime splitting.
std::uint64_t ideal_divisor_count(const QuadraticField& F, const QFElem& c);

// |S(m,n;c)| / (gcd(m,n,c)^{1/2} tau(c) c^{1/2}).
Real weil_margin_z(long m, long n, long c);

// |Kl| / (N(gcd((alpha),(1),(c)))^{1/2} tau((c)) |N(c)|^{1/2}).
Real weil_margin_nf(const KloostermanQuery& query);

// One generator per principal ideal (c) with 0 < |N(c)| <= max_norm,
// deterministic order (by |norm|, then coordinates).
std::vector<QFElem> ideal_representatives(const QuadraticField& F,
                                          std::uint64_t max_norm);

struct UnitSum {
  Real partial = 0.0L;
  Real limit = 0.0L;  // geometric series closed form 1 + 2/(g^e - 1)
};

// sum over eta = g^t, |t| <= terms, of prod_{|eta_j| < 1} |eta_j|^e
// (equivalently the delta-variant with the large embedding).
UnitSum unit_sum(const QuadraticField& F, Real exponent, int terms);

// Totally positive unit u minimizing max_j |log((a u)_j / sqrt(N(a)))|,
// plus the rescaled element's embeddings.
struct RescaleResult {
  QFElem unit;
  Real embedding_ratio;  // max_j (au)_j / sqrt(N(a))
};
RescaleResult unit_rescale(const QuadraticField& F, const QFElem& a);

// CSV table (field_disc, alpha, c_coords, norm_c, re, im, weil_ratio).
std::string kloosterman_table_csv(const QuadraticField& F, const QFElem& alpha,
                                  std::uint64_t max_norm);

}  // namespace rslab
