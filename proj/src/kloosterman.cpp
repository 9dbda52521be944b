#include "rslab/kloosterman.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rslab/arith.hpp"
#include "rslab/modforms.hpp"

namespace rslab {

Real QuadraticField::sqrt_disc() const { return std::sqrt((Real)disc); }

QuadraticField make_field(long squarefree_d) {
  // Fundamental units eps_0 = a + b omega for the supported fields; all
  // of these have norm -1, so the totally positive units are generated
  // by eps_0^2 and [O^{x+} : O^{x2}] = 1.
  static const std::map<long, std::pair<long, long>> units{
      {5, {0, 1}}, {13, {1, 1}}, {17, {3, 2}}, {29, {2, 1}}};
  auto it = units.find(squarefree_d);
  if (it == units.end())
    throw std::invalid_argument(
        "make_field: unsupported field (need D = 1 mod 4, narrow class "
        "number 1: D in {5, 13, 17, 29})");
  QuadraticField F;
  F.disc = squarefree_d;
  F.omega_sq_const = (squarefree_d - 1) / 4;
  F.fundamental_unit = {it->second.first, it->second.second};
  if (qf_norm(F, F.fundamental_unit) != -1)
    throw std::runtime_error("make_field: unit table inconsistent");
  F.tp_unit_generator = qf_mul(F, F.fundamental_unit, F.fundamental_unit);
  F.different_gen = {-1, 2};  // sqrt(D) = 2 omega - 1
  F.narrow_class_number = 1;
  F.unit_index = 1;
  return F;
}

QFElem qf_add(const QuadraticField&, const QFElem& x, const QFElem& y) {
  return {x.a + y.a, x.b + y.b};
}

QFElem qf_mul(const QuadraticField& F, const QFElem& x, const QFElem& y) {
  // (a1 + b1 w)(a2 + b2 w) with w^2 = w + q.
  mpz_class bb = x.b * y.b;
  return {x.a * y.a + F.omega_sq_const * bb, x.a * y.b + x.b * y.a + bb};
}

QFElem qf_conj(const QuadraticField&, const QFElem& x) {
  // conj(w) = 1 - w.
  return {x.a + x.b, -x.b};
}

mpz_class qf_norm(const QuadraticField& F, const QFElem& x) {
  return x.a * x.a + x.a * x.b - F.omega_sq_const * x.b * x.b;
}

mpz_class qf_trace(const QuadraticField&, const QFElem& x) {
  return 2 * x.a + x.b;
}

std::pair<Real, Real> qf_embed(const QuadraticField& F, const QFElem& x) {
  Real sd = F.sqrt_disc();
  Real a = mpz_to_real(x.a), b = mpz_to_real(x.b);
  return {a + b * 0.5L * (1.0L + sd), a + b * 0.5L * (1.0L - sd)};
}

bool qf_totally_positive(const QuadraticField& F, const QFElem& x) {
  auto [s1, s2] = qf_embed(F, x);
  return s1 > 0.0L && s2 > 0.0L;
}

QFElem qf_pow(const QuadraticField& F, const QFElem& x, long e) {
  if (e < 0) throw std::invalid_argument("qf_pow: exponent must be >= 0");
  QFElem result{1, 0};
  QFElem sq = x;
  while (e > 0) {
    if (e & 1) result = qf_mul(F, result, sq);
    e >>= 1;
    if (e) sq = qf_mul(F, sq, sq);
  }
  return result;
}

QFElem qf_unit_inverse(const QuadraticField& F, const QFElem& u) {
  mpz_class n = qf_norm(F, u);
  QFElem c = qf_conj(F, u);
  if (n == 1) return c;
  if (n == -1) return {-c.a, -c.b};
  throw std::invalid_argument("qf_unit_inverse: element is not a unit");
}

namespace {

// Lattice of the principal ideal (c) in (1, omega) coordinates:
// columns c * 1 and c * omega.
std::array<std::array<mpz_class, 2>, 2> ideal_columns(const QuadraticField& F,
                                                      const QFElem& c) {
  return {{{c.a, c.b}, {F.omega_sq_const * c.b, c.a + c.b}}};
}

// Triangular lattice basis v1 = (p, r), v2 = (0, s) with p, s > 0,
// computed by integer column reduction from any spanning set.
struct TriangularBasis {
  mpz_class p, r, s;
};

TriangularBasis triangularize(std::vector<std::array<mpz_class, 2>> cols) {
  // Zero out the first row of all but one column by the Euclid step.
  std::size_t pivot = 0;
  for (;;) {
    std::size_t best = cols.size();
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (cols[i][0] != 0 && (best == cols.size() ||
                              abs(cols[i][0]) < abs(cols[best][0])))
        best = i;
    if (best == cols.size())
      throw std::runtime_error("triangularize: rank deficient lattice");
    pivot = best;
    bool done = true;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i == pivot || cols[i][0] == 0) continue;
      mpz_class q = cols[i][0] / cols[pivot][0];  // truncated is fine here
      cols[i][0] -= q * cols[pivot][0];
      cols[i][1] -= q * cols[pivot][1];
      if (cols[i][0] != 0) done = false;
    }
    if (done) break;
  }
  TriangularBasis basis;
  basis.p = abs(cols[pivot][0]);
  basis.r = cols[pivot][0] > 0 ? cols[pivot][1] : -cols[pivot][1];
  mpz_class s = 0;
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (i != pivot) mpz_gcd(s.get_mpz_t(), s.get_mpz_t(), cols[i][1].get_mpz_t());
  if (s == 0) throw std::runtime_error("triangularize: rank deficient lattice");
  basis.s = s;
  mpz_mod(basis.r.get_mpz_t(), basis.r.get_mpz_t(), basis.s.get_mpz_t());
  return basis;
}

}  // namespace

bool qf_invert_mod(const QuadraticField& F, const QFElem& x, const QFElem& c,
                   QFElem* inverse) {
  // Column-reduce [mult-by-x | lattice(c)] over Z with a tracked
  // transform; x is invertible iff the module is all of Z^2, in which
  // case e_1 pulls back to the inverse's coordinates.
  auto lat = ideal_columns(F, c);
  std::array<std::array<mpz_class, 2>, 4> cols = {
      {{x.a, x.b},
       {F.omega_sq_const * x.b, x.a + x.b},
       lat[0],
       lat[1]}};
  // trans[i] = expression of column i in the original generators; only
  // the first two coordinates (the x-multiplier) are needed.
  std::array<std::array<mpz_class, 2>, 4> trans = {
      {{1, 0}, {0, 1}, {0, 0}, {0, 0}}};
  auto colop = [&](std::size_t i, std::size_t piv, const mpz_class& q) {
    cols[i][0] -= q * cols[piv][0];
    cols[i][1] -= q * cols[piv][1];
    trans[i][0] -= q * trans[piv][0];
    trans[i][1] -= q * trans[piv][1];
  };
  std::size_t pivot = 0;
  for (;;) {
    std::size_t best = 4;
    for (std::size_t i = 0; i < 4; ++i)
      if (cols[i][0] != 0 && (best == 4 || abs(cols[i][0]) < abs(cols[best][0])))
        best = i;
    if (best == 4) return false;
    pivot = best;
    bool done = true;
    for (std::size_t i = 0; i < 4; ++i) {
      if (i == pivot || cols[i][0] == 0) continue;
      colop(i, pivot, cols[i][0] / cols[pivot][0]);
      if (cols[i][0] != 0) done = false;
    }
    if (done) break;
  }
  if (abs(cols[pivot][0]) != 1) return false;
  if (cols[pivot][0] < 0) {
    for (int j : {0, 1}) {
      cols[pivot][j] = -cols[pivot][j];
      trans[pivot][j] = -trans[pivot][j];
    }
  }
  // Second row among the other columns must generate all of Z.
  std::size_t second = 4;
  for (;;) {
    std::size_t best = 4;
    for (std::size_t i = 0; i < 4; ++i)
      if (i != pivot && cols[i][1] != 0 &&
          (best == 4 || abs(cols[i][1]) < abs(cols[best][1])))
        best = i;
    if (best == 4) return false;
    second = best;
    bool done = true;
    for (std::size_t i = 0; i < 4; ++i) {
      if (i == pivot || i == second || cols[i][1] == 0) continue;
      colop(i, second, cols[i][1] / cols[second][1]);
      if (cols[i][1] != 0) done = false;
    }
    if (done) break;
  }
  if (abs(cols[second][1]) != 1) return false;
  // e1 = pivot column - (its second entry / s) * second column.
  mpz_class factor = cols[pivot][1] * cols[second][1];  // s = +-1
  QFElem inv{trans[pivot][0] - factor * trans[second][0],
             trans[pivot][1] - factor * trans[second][1]};
  if (inverse) *inverse = inv;
  return true;
}

Real kloosterman_z(long m, long n, long c) {
  if (c < 1) throw std::invalid_argument("kloosterman_z: c >= 1");
  Real re = 0.0L, im = 0.0L;
  for (long x = 0; x < c; ++x) {
    long g = std::gcd(x, c);
    if (c == 1) g = 1;  // the single x = 0 term
    if (g != 1) continue;
    // Extended gcd inverse of x mod c.
    long r0 = c, r1 = x % c, t0 = 0, t1 = 1;
    while (r1 != 0) {
      long q = r0 / r1;
      long r2 = r0 - q * r1, t2 = t0 - q * t1;
      r0 = r1; r1 = r2; t0 = t1; t1 = t2;
    }
    long xbar = ((t0 % c) + c) % c;
    Real angle = kTwoPi * (Real)(((__int128)m * x + (__int128)n * xbar) % c) /
                 (Real)c;
    re += std::cos(angle);
    im += std::sin(angle);
  }
  if (std::fabs(im) > std::sqrt((Real)c) * 1e-9L)
    throw std::runtime_error("kloosterman_z: imaginary part did not cancel");
  return re;
}

Complex kloosterman_nf(const KloostermanQuery& query) {
  const QuadraticField& F = query.field;
  const QFElem& c = query.modulus_c;
  mpz_class nc = qf_norm(F, c);
  if (nc == 0) throw std::invalid_argument("kloosterman_nf: c must be nonzero");
  if (abs(nc) == 1) return Complex(1.0L, 0.0L);
  TriangularBasis basis = triangularize(
      {ideal_columns(F, c)[0], ideal_columns(F, c)[1]});
  QFElem cbar = qf_conj(F, c);
  QFElem ea = qf_mul(F, query.unit_eta, query.alpha);
  mpz_class nc_abs = abs(nc);
  Real nc_real = mpz_to_real(nc);
  Complex total = 0.0L;
  long p = basis.p.get_si(), s = basis.s.get_si();
  for (long x0 = 0; x0 < p; ++x0) {
    for (long x1 = 0; x1 < s; ++x1) {
      QFElem xi{x0, x1};
      QFElem xibar;
      // Non-invertible residues are excluded here; this is the unit
      // group filter for the sum.
      if (!qf_invert_mod(F, xi, c, &xibar)) continue;
      // Tr((alpha x + xbar) / (c eta^{-1})) with x = xi / sqrt(D),
      // xbar = xi^{-1} sqrt(D): division by c via conj(c) / N(c).
      QFElem t1 = qf_mul(F, qf_mul(F, ea, xi), cbar);
      QFElem t2 = qf_mul(F, qf_mul(F, query.unit_eta, xibar), cbar);
      mpz_class numer = t1.b + F.disc * t2.b;
      mpz_class rem;
      mpz_mod(rem.get_mpz_t(), numer.get_mpz_t(), nc_abs.get_mpz_t());
      Real angle = kTwoPi * mpz_to_real(rem) / nc_real;
      total += Complex(std::cos(angle), std::sin(angle));
    }
  }
  return total;
}

std::uint64_t ideal_divisor_count(const QuadraticField& F, const QFElem& c) {
  mpz_class n = abs(qf_norm(F, c));
  if (n == 0) throw std::invalid_argument("ideal_divisor_count: c nonzero");
  std::uint64_t norm = n.get_ui();
  std::uint64_t tau = 1;
  for (std::uint64_t p = 2; p * p <= norm || norm > 1; ++p) {
    if (p * p > norm) p = norm;  // final prime factor
    if (norm % p) continue;
    int v = 0;
    while (norm % p == 0) norm /= p, ++v;
    int chi = prime_splitting(F.disc, p);
    if (chi == 0) {
      tau *= v + 1;
    } else if (chi == -1) {
      if (v % 2)
        throw std::runtime_error("ideal_divisor_count: odd inert valuation");
      tau *= v / 2 + 1;
    } else {
      // Split: the rational content of c carries the balanced part.
      mpz_class pz = (long)p;
      int e0 = 0;
      mpz_class a = c.a, b = c.b;
      while (a % pz == 0 && b % pz == 0 && 2 * (e0 + 1) <= v) {
        a /= pz;
        b /= pz;
        ++e0;
      }
      tau *= (std::uint64_t)(e0 + 1) * (std::uint64_t)(v - e0 + 1);
    }
  }
  return tau;
}

Real weil_margin_z(long m, long n, long c) {
  Real s = std::fabs(kloosterman_z(m, n, c));
  long g = std::gcd(std::gcd(std::labs(m), std::labs(n)), c);
  return s / (std::sqrt((Real)g) * (Real)divisor_count(c) * std::sqrt((Real)c));
}

Real weil_margin_nf(const KloostermanQuery& query) {
  const QuadraticField& F = query.field;
  Real kl = std::abs(kloosterman_nf(query));
  // gcd((alpha), (1), (c)) = O_F since the second argument is the unit
  // ideal, so the gcd factor is 1.
  Real tau = (Real)ideal_divisor_count(F, query.modulus_c);
  Real norm = std::fabs(mpz_to_real(qf_norm(F, query.modulus_c)));
  return kl / (tau * std::sqrt(norm));
}

std::vector<QFElem> ideal_representatives(const QuadraticField& F,
                                          std::uint64_t max_norm) {
  // Every ideal has a generator with both embeddings below
  // sqrt(max_norm) * g, g the totally positive fundamental generator.
  auto [g1, g2] = qf_embed(F, F.tp_unit_generator);
  Real bound = std::sqrt((Real)max_norm) * g1 + 1.0L;
  long bmax = (long)(2.0L * bound / F.sqrt_disc()) + 2;
  struct Entry {
    QFElem elem;
    std::uint64_t norm;
  };
  std::map<std::tuple<long, long, long>, Entry> seen;
  for (long b = -bmax; b <= bmax; ++b) {
    // sigma_1 + sigma_2 = 2a + b, both embeddings in [-bound, bound].
    long alo = (long)std::floor((-2.0L * bound - b) / 2.0L) - 1;
    long ahi = (long)std::ceil((2.0L * bound - b) / 2.0L) + 1;
    for (long a = alo; a <= ahi; ++a) {
      QFElem c{a, b};
      mpz_class n = abs(qf_norm(F, c));
      if (n == 0 || n > (long)max_norm) continue;
      auto [s1, s2] = qf_embed(F, c);
      if (std::fabs(s1) > bound || std::fabs(s2) > bound) continue;
      TriangularBasis tb =
          triangularize({ideal_columns(F, c)[0], ideal_columns(F, c)[1]});
      std::tuple<long, long, long> key{tb.p.get_si(), tb.r.get_si(),
                                       tb.s.get_si()};
      auto it = seen.find(key);
      std::uint64_t norm = n.get_ui();
      if (it == seen.end()) {
        seen.emplace(key, Entry{c, norm});
      } else {
        // Deterministic representative: smallest (|a|, |b|, a, b).
        auto rank = [](const QFElem& e) {
          return std::make_tuple(abs(e.a), abs(e.b), e.a, e.b);
        };
        if (rank(c) < rank(it->second.elem)) it->second = Entry{c, norm};
      }
    }
  }
  std::vector<Entry> entries;
  for (auto& [key, e] : seen) entries.push_back(e);
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return std::make_tuple(x.norm, x.elem.a, x.elem.b) <
           std::make_tuple(y.norm, y.elem.a, y.elem.b);
  });
  std::vector<QFElem> out;
  for (auto& e : entries) out.push_back(e.elem);
  return out;
}

UnitSum unit_sum(const QuadraticField& F, Real exponent, int terms) {
  if (!(exponent > 0.0L && exponent < 1.0L))
    throw std::invalid_argument("unit_sum: exponent must lie in (0, 1)");
  auto [g1, g2] = qf_embed(F, F.tp_unit_generator);
  // eta = g^t has embeddings g1^t and g1^{-t}; exactly one is below 1
  // for t != 0, so each |t| = t > 0 contributes g1^{-t e} twice.
  UnitSum result;
  result.partial = 1.0L;
  Real ratio = std::pow(g1, -exponent);
  Real term = 1.0L;
  for (int t = 1; t <= terms; ++t) {
    term *= ratio;
    result.partial += 2.0L * term;
  }
  result.limit = 1.0L + 2.0L / (std::pow(g1, exponent) - 1.0L);
  return result;
}

RescaleResult unit_rescale(const QuadraticField& F, const QFElem& a) {
  if (!qf_totally_positive(F, a))
    throw std::invalid_argument("unit_rescale: element must be totally positive");
  auto [a1, a2] = qf_embed(F, a);
  auto [g1, g2] = qf_embed(F, F.tp_unit_generator);
  Real sqrt_norm = std::sqrt(a1 * a2);
  long t = std::lround(std::log(a1 / sqrt_norm) / std::log(g1));
  QFElem u = (t >= 0)
                 ? qf_pow(F, qf_unit_inverse(F, F.tp_unit_generator), t)
                 : qf_pow(F, F.tp_unit_generator, -t);
  QFElem scaled = qf_mul(F, a, u);
  auto [s1, s2] = qf_embed(F, scaled);
  RescaleResult result;
  result.unit = u;
  result.embedding_ratio = std::max(s1, s2) / sqrt_norm;
  return result;
}

std::string kloosterman_table_csv(const QuadraticField& F, const QFElem& alpha,
                                  std::uint64_t max_norm) {
  std::ostringstream out;
  out << "field_disc,alpha,c_coords,norm_c,re,im,weil_ratio\n";
  char buf[200];
  for (const QFElem& c : ideal_representatives(F, max_norm)) {
    KloostermanQuery query{F, alpha, c, {1, 0}};
    Complex kl = kloosterman_nf(query);
    Real ratio = weil_margin_nf(query);
    std::snprintf(buf, sizeof buf,
                  "%ld,\"(%s,%s)\",\"(%s,%s)\",%s,%.18Le,%.18Le,%.18Le\n",
                  F.disc, alpha.a.get_str().c_str(), alpha.b.get_str().c_str(),
                  c.a.get_str().c_str(), c.b.get_str().c_str(),
                  qf_norm(F, c).get_str().c_str(), kl.real(), kl.imag(), ratio);
    out << buf;
  }
  return out.str();
}

}  // namespace rslab
