#include "rslab/modforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "rslab/specfun.hpp"

namespace rslab {

namespace {

using ZSeries = std::vector<mpz_class>;  // integer coefficients c_0..c_P

ZSeries zconv(const ZSeries& a, const ZSeries& b, std::size_t order) {
  ZSeries out(order + 1, 0);
  for (std::size_t i = 0; i < a.size() && i <= order; ++i) {
    if (a[i] == 0) continue;
    std::size_t jmax = std::min(b.size() - 1, order - i);
    for (std::size_t j = 0; j <= jmax; ++j) {
      if (b[j] == 0) continue;
      mpz_addmul(out[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
  }
  return out;
}

ZSeries zpow(const ZSeries& base, int e, std::size_t order) {
  ZSeries result(1, 1);
  ZSeries sq = base;
  while (e > 0) {
    if (e & 1) result = zconv(result, sq, order);
    e >>= 1;
    if (e) sq = zconv(sq, sq, order);
  }
  return result;
}

// sigma_r(n) q^n series body for the Eisenstein generators.
ZSeries sigma_series(int r, int order) {
  ZSeries out(order + 1, 0);
  for (int d = 1; d <= order; ++d) {
    mpz_class dp;
    mpz_ui_pow_ui(dp.get_mpz_t(), d, r);
    for (int n = d; n <= order; n += d) out[n] += dp;
  }
  return out;
}

ZSeries eisenstein_z(int weight, int order) {
  if (weight != 4 && weight != 6)
    throw std::invalid_argument("eisenstein_series: weight must be 4 or 6");
  if (order < 1) throw std::invalid_argument("eisenstein_series: order >= 1");
  ZSeries out = sigma_series(weight - 1, order);
  mpz_class scale = (weight == 4) ? 240 : -504;
  for (int n = 1; n <= order; ++n) out[n] *= scale;
  out[0] = 1;
  return out;
}

ZSeries delta_z(int order) {
  if (order < 1) throw std::invalid_argument("delta_series: order >= 1");
  // Euler product prod (1 - q^n) by the pentagonal number theorem.
  ZSeries eta(order, 0);  // order-1 suffices before the q shift
  eta[0] = 1;
  for (long j = 1;; ++j) {
    long e1 = j * (3 * j - 1) / 2, e2 = j * (3 * j + 1) / 2;
    if (e1 >= static_cast<long>(eta.size())) break;
    mpz_class sign = (j % 2) ? -1 : 1;
    eta[e1] += sign;
    if (e2 < static_cast<long>(eta.size())) eta[e2] += sign;
  }
  ZSeries p24 = zpow(eta, 24, eta.size() - 1);
  ZSeries out(order + 1, 0);
  for (int n = 1; n <= order; ++n) out[n] = p24[n - 1];
  return out;
}

QExpansion wrap(int weight, const ZSeries& z) {
  QExpansion q;
  q.weight = weight;
  q.coeffs.reserve(z.size());
  for (const auto& c : z) q.coeffs.emplace_back(c);
  return q;
}

// Monomial exponents Delta^i E4^a E6^b of weight k with b minimal.
struct Monomial {
  int delta_pow, e4_pow, e6_pow;
};

Monomial monomial_for(int weight, int delta_pow) {
  int r = weight - 12 * delta_pow;
  if (r < 0 || r % 2)
    throw std::runtime_error("miller_basis: no monomial of this weight");
  int b = (r % 4 == 0) ? 0 : 1;
  int a = (r - 6 * b) / 4;
  if (a < 0) throw std::runtime_error("miller_basis: no monomial of this weight");
  return {delta_pow, a, b};
}

std::vector<ZSeries> miller_basis_z(int weight, int order) {
  int d = cusp_dim(weight);
  std::vector<ZSeries> rows;
  if (d == 0) return rows;
  if (order < d + 1)
    throw std::invalid_argument("miller_basis: order too small for echelon");
  ZSeries e4 = eisenstein_z(4, order);
  ZSeries e6 = eisenstein_z(6, order);
  ZSeries delta = delta_z(order);
  // E4 powers up to the largest exponent used.
  int a_max = 0;
  for (int i = 1; i <= d; ++i) a_max = std::max(a_max, monomial_for(weight, i).e4_pow);
  std::vector<ZSeries> e4pow(a_max + 1);
  e4pow[0] = ZSeries{1};
  for (int a = 1; a <= a_max; ++a) e4pow[a] = zconv(e4pow[a - 1], e4, order);
  ZSeries dpow = delta;
  for (int i = 1; i <= d; ++i) {
    Monomial m = monomial_for(weight, i);
    ZSeries row = zconv(dpow, e4pow[m.e4_pow], order);
    if (m.e6_pow) row = zconv(row, e6, order);
    rows.push_back(std::move(row));
    if (i < d) dpow = zconv(dpow, delta, order);
  }
  // Row i leads with q^{i+1} (0-indexed) and leading coefficient 1, so
  // the elimination stays in integers: g_i -= g_i[j] * g_j for j > i.
  for (int i = d - 1; i >= 0; --i) {
    if (rows[i][i + 1] != 1)
      throw std::runtime_error("miller_basis: dimension check failed");
    for (int j = i + 1; j < d; ++j) {
      mpz_class c = rows[i][j + 1];
      if (c == 0) continue;
      for (int n = j + 1; n <= order; ++n)
        mpz_submul(rows[i][n].get_mpz_t(), c.get_mpz_t(),
                   rows[j][n].get_mpz_t());
    }
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= d; ++j)
      if (rows[i][j] != ((j == i + 1) ? 1 : 0))
        throw std::runtime_error("miller_basis: echelon check failed");
  return rows;
}

}  // namespace

QExpansion qexp_add(const QExpansion& a, const QExpansion& b) {
  if (a.weight != b.weight)
    throw std::invalid_argument("qexp_add: weight mismatch");
  QExpansion out;
  out.weight = a.weight;
  std::size_t n = std::min(a.coeffs.size(), b.coeffs.size());
  out.coeffs.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.coeffs[i] = a.coeffs[i] + b.coeffs[i];
  return out;
}

QExpansion qexp_mul(const QExpansion& a, const QExpansion& b) {
  QExpansion out;
  out.weight = a.weight + b.weight;
  std::size_t order = std::min(a.coeffs.size(), b.coeffs.size()) - 1;
  out.coeffs.assign(order + 1, 0);
  for (std::size_t i = 0; i <= order; ++i) {
    if (a.coeffs[i] == 0) continue;
    for (std::size_t j = 0; i + j <= order; ++j)
      if (b.coeffs[j] != 0) out.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
  }
  return out;
}

QExpansion eisenstein_series(int weight, int order) {
  return wrap(weight, eisenstein_z(weight, order));
}

QExpansion delta_series(int order) { return wrap(12, delta_z(order)); }

int cusp_dim(int weight) {
  if (weight < 12 || weight % 2) return 0;
  return weight / 12 - (weight % 12 == 2 ? 1 : 0);
}

std::vector<QExpansion> miller_basis(int weight, int order) {
  std::vector<QExpansion> out;
  for (const auto& row : miller_basis_z(weight, order))
    out.push_back(wrap(weight, row));
  return out;
}

RationalMatrix hecke_matrix(int weight, const std::vector<QExpansion>& basis,
                            int index) {
  int d = static_cast<int>(basis.size());
  if (index < 1) throw std::invalid_argument("hecke_matrix: index >= 1");
  for (const auto& g : basis)
    if (g.order() < index * (d + 1))
      throw std::invalid_argument("hecke_matrix: series order insufficient");
  // (T_m g)[j] = sum_{e | gcd(m,j)} e^{k-1} c(m j / e^2); the echelon
  // structure makes the first d coefficients the basis coordinates.
  RationalMatrix mat(d, std::vector<mpq_class>(d, 0));
  for (int i = 0; i < d; ++i) {
    for (int j = 1; j <= d; ++j) {
      mpq_class entry = 0;
      for (int e = 1; e <= std::min(index, j); ++e) {
        if (index % e || j % e) continue;
        long arg = static_cast<long>(index) * j / (static_cast<long>(e) * e);
        mpz_class ek;
        mpz_ui_pow_ui(ek.get_mpz_t(), e, weight - 1);
        entry += mpq_class(ek) * basis[i].coeffs.at(arg);
      }
      mat[j - 1][i] = entry;
    }
  }
  return mat;
}

namespace {

using QPoly = std::vector<mpq_class>;  // coefficients low to high

QPoly char_poly(const RationalMatrix& a) {
  int d = static_cast<int>(a.size());
  if (d == 1) return {-a[0][0], 1};
  if (d == 2) {
    mpq_class tr = a[0][0] + a[1][1];
    mpq_class det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    return {det, -tr, 1};
  }
  if (d == 3) {
    mpq_class tr = a[0][0] + a[1][1] + a[2][2];
    mpq_class m01 = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    mpq_class m02 = a[0][0] * a[2][2] - a[0][2] * a[2][0];
    mpq_class m12 = a[1][1] * a[2][2] - a[1][2] * a[2][1];
    mpq_class det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                    a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                    a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    return {-det, m01 + m02 + m12, -tr, 1};
  }
  throw std::runtime_error("char_poly: dimension above desk scale");
}

int degree(const QPoly& p) {
  for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
    if (p[i] != 0) return i;
  return -1;
}

mpq_class eval(const QPoly& p, const mpq_class& x) {
  mpq_class v = 0;
  for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i) v = v * x + p[i];
  return v;
}

QPoly derivative(const QPoly& p) {
  QPoly out;
  for (std::size_t i = 1; i < p.size(); ++i) out.push_back(mpq_class(static_cast<long>(i)) * p[i]);
  if (out.empty()) out.push_back(0);
  return out;
}

QPoly neg_rem(const QPoly& num, const QPoly& den) {
  QPoly r = num;
  int dd = degree(den);
  for (int dr = degree(r); dr >= dd && dr >= 0; dr = degree(r)) {
    mpq_class q = r[dr] / den[dd];
    for (int i = 0; i <= dd; ++i) r[dr - dd + i] -= q * den[i];
    r[dr] = 0;
  }
  for (auto& c : r) c = -c;
  r.resize(std::max(degree(r) + 1, 1));
  return r;
}

std::vector<QPoly> sturm_chain(const QPoly& p) {
  std::vector<QPoly> chain{p, derivative(p)};
  while (degree(chain.back()) > 0) {
    QPoly next = neg_rem(chain[chain.size() - 2], chain.back());
    if (degree(next) < 0) break;  // exact division: repeated root upstream
    chain.push_back(next);
  }
  return chain;
}

int sign_changes(const std::vector<QPoly>& chain, const mpq_class& x) {
  int changes = 0, last = 0;
  for (const auto& q : chain) {
    int s = sgn(eval(q, x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

bool has_repeated_root(const QPoly& p) {
  auto chain = sturm_chain(p);
  return degree(chain.back()) > 0 || degree(chain.back()) < 0;
}

// Isolating intervals for all real roots, then Newton refinement in Real.
std::vector<Real> isolated_real_roots(const QPoly& p) {
  int deg = degree(p);
  auto chain = sturm_chain(p);
  mpq_class bound = 1;
  for (int i = 0; i < deg; ++i) {
    mpq_class ratio = abs(p[i] / p[deg]);
    if (ratio > bound) bound = ratio;
  }
  bound += 1;
  struct Interval {
    mpq_class lo, hi;
    int count;
  };
  std::vector<Interval> work{{-bound, bound,
                              sign_changes(chain, -bound) -
                                  sign_changes(chain, bound)}};
  std::vector<std::pair<mpq_class, mpq_class>> isolated;
  while (!work.empty()) {
    Interval iv = work.back();
    work.pop_back();
    if (iv.count == 0) continue;
    if (iv.count == 1 && iv.hi - iv.lo < mpq_class(1, 1024)) {
      isolated.emplace_back(iv.lo, iv.hi);
      continue;
    }
    mpq_class mid = (iv.lo + iv.hi) / 2;
    if (eval(p, mid) == 0) {
      // Nudge the split point off the root.
      mid = (iv.lo + 3 * iv.hi) / 4;
    }
    int left = sign_changes(chain, iv.lo) - sign_changes(chain, mid);
    work.push_back({iv.lo, mid, left});
    work.push_back({mid, iv.hi, iv.count - left});
  }
  std::vector<Real> roots;
  std::vector<Real> pr(p.size()), dpr;
  for (std::size_t i = 0; i < p.size(); ++i)
    pr[i] = mpz_to_real(p[i].get_num()) / mpz_to_real(p[i].get_den());
  for (std::size_t i = 1; i < pr.size(); ++i) dpr.push_back(Real(i) * pr[i]);
  auto evalr = [](const std::vector<Real>& q, Real x) {
    Real v = 0.0L;
    for (std::size_t i = q.size(); i-- > 0;) v = v * x + q[i];
    return v;
  };
  for (auto& [lo, hi] : isolated) {
    Real x = 0.5L * (mpz_to_real(lo.get_num()) / mpz_to_real(lo.get_den()) +
                     mpz_to_real(hi.get_num()) / mpz_to_real(hi.get_den()));
    for (int it = 0; it < 60; ++it) {
      Real f = evalr(pr, x), df = evalr(dpr, x);
      if (df == 0.0L) break;
      Real step = f / df;
      x -= step;
      if (std::fabs(step) < std::fabs(x) * 1e-19L + 1e-30L) break;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<Real> matrix_to_real(const RationalMatrix& a) {
  int d = static_cast<int>(a.size());
  std::vector<Real> out(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      out[i * d + j] =
          mpz_to_real(a[i][j].get_num()) / mpz_to_real(a[i][j].get_den());
  return out;
}

// Null vector of (A - lambda I) for d <= 3 via explicit minors.
std::vector<Real> null_vector(const std::vector<Real>& a, int d, Real lambda) {
  if (d == 1) return {1.0L};
  auto at = [&](int i, int j) {
    return a[i * d + j] - (i == j ? lambda : 0.0L);
  };
  if (d == 2) {
    std::vector<Real> v1{at(0, 1), -at(0, 0)};
    std::vector<Real> v2{at(1, 1), -at(1, 0)};
    Real n1 = std::fabs(v1[0]) + std::fabs(v1[1]);
    Real n2 = std::fabs(v2[0]) + std::fabs(v2[1]);
    return n1 >= n2 ? v1 : v2;
  }
  // d = 3: cross products of row pairs; take the largest.
  std::vector<Real> best(3, 0.0L);
  Real best_norm = -1.0L;
  int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (auto& pr : pairs) {
    int r = pr[0], s = pr[1];
    std::vector<Real> v{at(r, 1) * at(s, 2) - at(r, 2) * at(s, 1),
                        at(r, 2) * at(s, 0) - at(r, 0) * at(s, 2),
                        at(r, 0) * at(s, 1) - at(r, 1) * at(s, 0)};
    Real norm = std::fabs(v[0]) + std::fabs(v[1]) + std::fabs(v[2]);
    if (norm > best_norm) {
      best_norm = norm;
      best = v;
    }
  }
  return best;
}

}  // namespace

std::vector<Eigenform> eigenforms(int weight, int coeff_limit, int prec_bits) {
  if (coeff_limit < 2) throw std::invalid_argument("eigenforms: limit >= 2");
  if (weight < 12 || weight % 2)
    throw std::invalid_argument("eigenforms: even weight >= 12 required");
  (void)prec_bits;  // Real carries the full working precision
  int d = cusp_dim(weight);
  if (d == 0) return {};
  int order = std::max(coeff_limit, 8 * (d + 1));
  auto zbasis = miller_basis_z(weight, order);
  std::vector<QExpansion> basis;
  for (auto& row : zbasis) {
    // Only the low-order part is needed for the Hecke matrices.
    ZSeries head(row.begin(), row.begin() + std::min<std::size_t>(
                                                row.size(), 8 * (d + 1) + 1));
    basis.push_back(wrap(weight, head));
  }
  RationalMatrix t2 = hecke_matrix(weight, basis, 2);
  RationalMatrix mix = t2;
  QPoly poly = char_poly(mix);
  if (has_repeated_root(poly)) {
    // Separate a repeated T_2 eigenvalue with T_3, then T_5.
    RationalMatrix t3 = hecke_matrix(weight, basis, 3);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) mix[i][j] = t2[i][j] + 997 * t3[i][j];
    poly = char_poly(mix);
    if (has_repeated_root(poly)) {
      RationalMatrix t5 = hecke_matrix(weight, basis, 5);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) mix[i][j] += 993 * t5[i][j];
      poly = char_poly(mix);
      if (has_repeated_root(poly))
        throw std::runtime_error(
            "eigenforms: T_2, T_3, T_5 do not separate the eigenspaces");
    }
  }
  std::vector<Real> roots = isolated_real_roots(poly);
  if (static_cast<int>(roots.size()) != d)
    throw std::runtime_error("eigenforms: root isolation lost a root");

  std::vector<Real> mixr = matrix_to_real(mix);
  std::vector<Eigenform> forms;
  for (Real lambda : roots) {
    std::vector<Real> v = null_vector(mixr, d, lambda);
    if (std::fabs(v[0]) < 1e-12L * (std::fabs(v[0]) + std::fabs(v[d - 1])))
      throw std::runtime_error("eigenforms: eigenvector has vanishing a(1)");
    for (int j = d - 1; j >= 0; --j) v[j] /= v[0];
    Eigenform f;
    f.weight = weight;
    f.raw_coeffs.assign(coeff_limit + 1, 0.0L);
    f.normalized.assign(coeff_limit + 1, 0.0L);
    for (int m = 1; m <= coeff_limit; ++m) {
      Real a = 0.0L;
      for (int j = 0; j < d; ++j) a += v[j] * mpz_to_real(zbasis[j][m]);
      f.raw_coeffs[m] = a;
      f.normalized[m] =
          a * std::exp(-0.5L * (weight - 1) * std::log((Real)m));
    }
    forms.push_back(std::move(f));
  }
  // Deterministic ordering by the T_2 eigenvalue a(2).
  std::sort(forms.begin(), forms.end(), [](const auto& a, const auto& b) {
    return a.raw_coeffs[2] < b.raw_coeffs[2];
  });
  for (int i = 0; i < d; ++i) forms[i].eigenvalue_index = i;
  return forms;
}

const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    Real x = std::cos(kPi * (i + 0.75L) / (n + 0.5L));
    Real dp = 0.0L;
    for (int it2 = 0; it2 < 100; ++it2) {
      Real p0 = 1.0L, p1 = x;
      for (int j = 2; j <= n; ++j) {
        Real p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0L);
      Real step = p1 / dp;
      x -= step;
      if (std::fabs(step) < 1e-19L) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0L / ((1.0L - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

Real fundamental_domain_integral(const std::function<Real(Real, Real)>& fn,
                                 Real y_max, int x_nodes, int y_nodes) {
  const GaussRule& gx = gauss_legendre(x_nodes);
  const GaussRule& gy = gauss_legendre(y_nodes);
  Real total = 0.0L;
  for (int ix = 0; ix < x_nodes; ++ix) {
    Real x = 0.25L * (gx.nodes[ix] + 1.0L);  // [0, 1/2]
    Real wx = 0.25L * gx.weights[ix];
    Real ylo = std::sqrt(1.0L - x * x);
    // Panel edges: the curved arc up to 2, then unit panels.
    std::vector<Real> edges{ylo};
    for (Real e = 2.0L; e < y_max; e += 1.0L) edges.push_back(e);
    edges.push_back(y_max);
    Real inner = 0.0L;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      Real a = edges[p], b = edges[p + 1];
      Real half = 0.5L * (b - a), mid = 0.5L * (a + b);
      for (int iy = 0; iy < y_nodes; ++iy)
        inner += half * gy.weights[iy] * fn(x, mid + half * gy.nodes[iy]);
    }
    total += wx * inner;
  }
  return 2.0L * total;  // even in x
}

namespace {

// |f(x+iy)|^2 for a q-expansion with real coefficients, Horner in
// q = e^{2 pi i (x + i y)}.
Real abs_f_squared(const std::vector<Real>& a, int terms, Real x, Real y) {
  Real qr = std::exp(-kTwoPi * y) * std::cos(kTwoPi * x);
  Real qi = std::exp(-kTwoPi * y) * std::sin(kTwoPi * x);
  Real sr = 0.0L, si = 0.0L;
  for (int m = terms; m >= 1; --m) {
    Real tr = sr * qr - si * qi + a[m];
    si = sr * qi + si * qr;
    sr = tr;
  }
  // Multiply by q once more for the leading q^1.
  Real fr = sr * qr - si * qi;
  Real fi = sr * qi + si * qr;
  return fr * fr + fi * fi;
}

}  // namespace

Real petersson_norm(const Eigenform& form, Real tolerance) {
  if (!(tolerance > 0.0L))
    throw std::invalid_argument("petersson_norm: tolerance > 0");
  const int k = form.weight;
  const int limit = form.coeff_limit();
  // Coefficient tail at the domain floor y = sqrt(3)/2: find the number
  // of terms that pushes |a(m)| e^{-pi sqrt(3) m} below the target.
  const Real floor_rate = kPi * std::sqrt(3.0L);
  Real cut = tolerance * 1e-4L;
  int terms = 0;
  for (int m = 1; m <= limit; ++m) {
    Real bound = std::fabs(form.raw_coeffs[m]) * std::exp(-floor_rate * m);
    if (bound > cut || m < k) terms = m;
  }
  {
    // The next (unavailable) coefficient must already be negligible.
    Real next = std::exp(0.5L * (k + 1) * std::log((Real)limit + 1.0L) -
                         floor_rate * (limit + 1));
    if (next > cut) {
      int needed = limit;
      while (std::exp(0.5L * (k + 1) * std::log((Real)needed) -
                      floor_rate * needed) > cut)
        ++needed;
      throw std::runtime_error(
          "petersson_norm: need q-expansion to order >= " +
          std::to_string(needed));
    }
  }
  // Height cutoff: the surviving integrand mass above Y is of the order
  // e^{-4 pi Y} Y^{k-2}.
  Real y_peak = std::max(1.0L, (k - 2) / (4.0L * kPi));
  Real y_max = y_peak;
  while (-4.0L * kPi * y_max + (k - 2) * std::log(y_max) >
         std::log(cut) - 4.0L * kPi * y_peak + (k - 2) * std::log(y_peak) -
             10.0L)
    y_max += 0.5L;
  auto integrand = [&](Real x, Real y) {
    return abs_f_squared(form.raw_coeffs, terms, x, y) *
           std::pow(y, (Real)(k - 2));
  };
  Real prev = 0.0L;
  for (int nx = 24, ny = 16, round = 0; round < 4; nx *= 2, ny *= 2, ++round) {
    Real value = fundamental_domain_integral(integrand, y_max, nx, ny) /
                 kModularCovolume;
    if (round > 0 && std::fabs(value - prev) < tolerance) return value;
    prev = value;
  }
  throw std::runtime_error("petersson_norm: quadrature did not converge");
}

Real harmonic_weight(const Eigenform& form) {
  if (!(form.petersson_norm > 0.0L))
    throw std::invalid_argument("harmonic_weight: petersson_norm not set");
  int k = form.weight;
  return std::exp(std::lgamma((Real)(k - 1)) -
                  (k - 1) * std::log(4.0L * kPi)) /
         form.petersson_norm;
}

void attach_norms(std::vector<Eigenform>& forms, Real tolerance) {
  for (auto& f : forms) {
    Real scale = std::exp(std::lgamma((Real)(f.weight - 1)) -
                          (f.weight - 1) * std::log(4.0L * kPi));
    // Absolute tolerance scaled to the size of <f,f> itself so the
    // harmonic weight comes out uniformly accurate across weights.
    f.petersson_norm = petersson_norm(f, tolerance * scale);
    f.harmonic_weight = harmonic_weight(f);
  }
}

namespace {

std::string real_to_text(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.25Le", v);
  return buf;
}

Real text_to_real(const std::string& s) { return std::strtold(s.c_str(), nullptr); }

}  // namespace

void save_eigenforms(const std::string& path,
                     const std::vector<Eigenform>& forms, int prec_bits) {
  nlohmann::json doc;
  doc["format_version"] = 1;
  doc["weight"] = forms.empty() ? 0 : forms[0].weight;
  doc["dim"] = forms.size();
  doc["precision_bits"] = prec_bits;
  doc["forms"] = nlohmann::json::array();
  for (const auto& f : forms) {
    nlohmann::json jf;
    jf["eigenvalue_index"] = f.eigenvalue_index;
    for (const auto& c : f.raw_coeffs) jf["raw_coeffs"].push_back(real_to_text(c));
    for (const auto& c : f.normalized) jf["normalized"].push_back(real_to_text(c));
    jf["petersson_norm"] = real_to_text(f.petersson_norm);
    jf["harmonic_weight"] = real_to_text(f.harmonic_weight);
    doc["forms"].push_back(std::move(jf));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_eigenforms: cannot open " + path);
  out << doc.dump(1) << '\n';
}

std::vector<Eigenform> load_eigenforms(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_eigenforms: cannot open " + path);
  nlohmann::json doc = nlohmann::json::parse(in);
  if (doc.value("format_version", 0) != 1)
    throw std::runtime_error("load_eigenforms: unsupported cache version in " +
                             path);
  std::vector<Eigenform> forms;
  for (const auto& jf : doc.at("forms")) {
    Eigenform f;
    f.weight = doc.at("weight").get<int>();
    f.eigenvalue_index = jf.at("eigenvalue_index").get<int>();
    for (const auto& c : jf.at("raw_coeffs")) f.raw_coeffs.push_back(text_to_real(c.get<std::string>()));
    for (const auto& c : jf.at("normalized")) f.normalized.push_back(text_to_real(c.get<std::string>()));
    f.petersson_norm = text_to_real(jf.at("petersson_norm").get<std::string>());
    f.harmonic_weight = text_to_real(jf.at("harmonic_weight").get<std::string>());
    forms.push_back(std::move(f));
  }
  return forms;
}

Real mpz_to_real(const mpz_class& z) {
  const mpz_srcptr p = z.get_mpz_t();
  std::size_t limbs = mpz_size(p);
  Real value = 0.0L;
  const Real base = 18446744073709551616.0L;  // 2^64
  for (std::size_t i = limbs; i-- > 0;)
    value = value * base + (Real)mpz_getlimbn(p, i);
  return mpz_sgn(p) < 0 ? -value : value;
}

}  // namespace rslab
