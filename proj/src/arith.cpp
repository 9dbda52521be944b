#include "rslab/arith.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <eigen3/Eigen/Dense>

namespace rslab {

std::uint64_t divisor_count(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("divisor_count: n must be >= 1");
  std::uint64_t count = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    std::uint64_t e = 0;
    while (n % p == 0) n /= p, ++e;
    count *= e + 1;
  }
  if (n > 1) count *= 2;
  return count;
}

int kronecker_symbol(std::int64_t a, std::uint64_t n) {
  // Standard Jacobi/Kronecker algorithm; n > 0.
  if (n == 0) throw std::invalid_argument("kronecker_symbol: n must be > 0");
  int result = 1;
  // Factor out 2s in n: (a|2) = 0, 1, -1 for a even, a = +-1 mod 8, else.
  while (n % 2 == 0) {
    n /= 2;
    if (a % 2 == 0) return 0;
    std::int64_t r = ((a % 8) + 8) % 8;
    if (r == 3 || r == 5) result = -result;
  }
  a = ((a % static_cast<std::int64_t>(n)) + static_cast<std::int64_t>(n)) %
      static_cast<std::int64_t>(n);
  std::uint64_t b = static_cast<std::uint64_t>(a);
  std::uint64_t m = n;
  while (b != 0) {
    while (b % 2 == 0) {
      b /= 2;
      std::uint64_t r = m % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(b, m);
    if (b % 4 == 3 && m % 4 == 3) result = -result;
    b %= m;
  }
  return m == 1 ? result : 0;
}

std::int64_t field_discriminant(std::int64_t squarefree_d) {
  if (squarefree_d <= 1)
    throw std::invalid_argument("field_discriminant: need squarefree D > 1");
  return (squarefree_d % 4 == 1) ? squarefree_d : 4 * squarefree_d;
}

int prime_splitting(std::int64_t squarefree_d, std::uint64_t p) {
  std::int64_t disc = field_discriminant(squarefree_d);
  if (disc % static_cast<std::int64_t>(p) == 0) return 0;
  return kronecker_symbol(disc, p);
}

namespace {

// Fields currently supported for exact ideal counting: Q and real
// quadratic fields with narrow class number 1 (the ones this code ever
// instantiates).  Narrow h = 1 forces every ideal to have a totally
// positive generator, which is what makes the counts purely
// multiplicative over prime powers.
bool narrow_class_number_one(std::int64_t squarefree_d) {
  switch (squarefree_d) {
    case 2:
    case 5:
    case 13:
    case 17:
    case 29:
      return true;
    default:
      return false;
  }
}

}  // namespace

IdealCountTable ideal_norm_counts(std::int64_t field_disc,
                                  std::uint64_t level_norm,
                                  std::uint64_t limit) {
  if (limit < 1) throw std::invalid_argument("ideal_norm_counts: limit >= 1");
  if (field_disc != 1 && !narrow_class_number_one(field_disc))
    throw std::invalid_argument(
        "ideal_norm_counts: field not supported (narrow class number != 1)");

  IdealCountTable table;
  table.field_disc = field_disc;
  table.level_norm = level_norm;
  table.limit = limit;
  table.counts.assign(limit + 1, 0);
  table.counts[1] = 1;

  if (field_disc == 1) {
    for (std::uint64_t d = 1; d <= limit; ++d)
      table.counts[d] = (std::gcd(d, level_norm) == 1) ? 1 : 0;
    return table;
  }

  // Smallest-prime-factor sieve, then multiplicative assembly.
  std::vector<std::uint32_t> spf(limit + 1, 0);
  for (std::uint64_t p = 2; p <= limit; ++p) {
    if (spf[p]) continue;
    for (std::uint64_t q = p; q <= limit; q += p)
      if (!spf[q]) spf[q] = static_cast<std::uint32_t>(p);
  }
  auto prime_power_count = [&](std::uint64_t p, std::uint32_t v) -> std::int64_t {
    if (level_norm % p == 0) return 0;
    int chi = prime_splitting(field_disc, p);
    if (chi == 1) return v + 1;
    if (chi == -1) return (v % 2 == 0) ? 1 : 0;
    return 1;  // ramified
  };
  for (std::uint64_t d = 2; d <= limit; ++d) {
    std::uint64_t p = spf[d];
    std::uint64_t m = d;
    std::uint32_t v = 0;
    while (m % p == 0) m /= p, ++v;
    table.counts[d] = table.counts[m] * prime_power_count(p, v);
  }
  return table;
}

Real gamma_minus_one(std::uint64_t level_norm) {
  if (level_norm == 0)
    throw std::invalid_argument("gamma_minus_one: level_norm >= 1");
  Real value = 1.0L;
  std::uint64_t n = level_norm;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    value *= 1.0L - 1.0L / static_cast<Real>(p);
  }
  if (n > 1) value *= 1.0L - 1.0L / static_cast<Real>(n);
  return value;
}

Real dedekind_residue_estimate(const IdealCountTable& table) {
  // Partial sums A(X) on a grid of X values in [limit/2, limit]; the
  // least-squares slope of A(X) vs X estimates the residue at s = 1.
  const std::uint64_t limit = table.limit;
  if (limit < 100)
    throw std::invalid_argument("dedekind_residue_estimate: limit too small");
  const int grid = 32;
  std::vector<std::uint64_t> xs(grid);
  for (int i = 0; i < grid; ++i)
    xs[i] = limit / 2 + (limit / 2) * (i + 1) / grid;

  Eigen::Matrix<Real, Eigen::Dynamic, 2> design(grid, 2);
  Eigen::Matrix<Real, Eigen::Dynamic, 1> rhs(grid);
  std::uint64_t x_index = 0;
  long double partial = 0.0L;
  int row = 0;
  for (std::uint64_t d = 1; d <= limit; ++d) {
    partial += static_cast<Real>(table.counts[d]);
    while (x_index < xs.size() && d == xs[x_index]) {
      design(row, 0) = static_cast<Real>(d);
      design(row, 1) = 1.0L;
      rhs(row) = partial;
      ++row;
      ++x_index;
    }
  }
  Eigen::Matrix<Real, 2, 1> coeffs =
      (design.transpose() * design).ldlt().solve(design.transpose() * rhs);
  return coeffs(0);
}

Real dedekind_residue_estimate(std::int64_t field_disc, std::uint64_t limit) {
  return dedekind_residue_estimate(ideal_norm_counts(field_disc, 1, limit));
}

Real dedekind_zeta_euler(std::int64_t field_disc, Real s, std::uint64_t pmax) {
  Real product = 1.0L;
  for (std::uint64_t p : primes_up_to(pmax)) {
    Real ps = std::pow(static_cast<Real>(p), -s);
    if (field_disc == 1) {
      product /= 1.0L - ps;
      continue;
    }
    int chi = prime_splitting(field_disc, p);
    if (chi == 1)
      product /= (1.0L - ps) * (1.0L - ps);
    else if (chi == -1)
      product /= 1.0L - ps * ps;
    else
      product /= 1.0L - ps;
  }
  return product;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t n) {
  std::vector<bool> composite(n + 1, false);
  std::vector<std::uint64_t> primes;
  for (std::uint64_t p = 2; p <= n; ++p) {
    if (composite[p]) continue;
    primes.push_back(p);
    for (std::uint64_t q = p * p; q <= n; q += p) composite[q] = true;
  }
  return primes;
}

}  // namespace rslab
