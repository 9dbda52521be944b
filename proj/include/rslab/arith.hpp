#pragma once

#include <cstdint>
#include <vector>

#include "rslab/types.hpp"

namespace rslab {

// Table of a_d(n) = #{integral ideals of norm d coprime to the level},
// d = 1..limit.  field_disc = 1 encodes Q; otherwise the (squarefree)
// D of Q(sqrt(D)) with narrow class number 1.
struct IdealCountTable {
  std::int64_t field_disc = 1;
  std::uint64_t level_norm = 1;
  std::vector<std::int64_t> counts;  // counts[d], index 0 unused
  std::uint64_t limit = 0;

  std::int64_t operator[](std::uint64_t d) const { return counts[d]; }
};

// Number of positive divisors of n.  Rejects n = 0.
std::uint64_t divisor_count(std::uint64_t n);

// Kronecker symbol (a|n), n > 0.
int kronecker_symbol(std::int64_t a, std::uint64_t n);

// Discriminant of Q(sqrt(D)) for squarefree D: D if D = 1 mod 4, else 4D.
std::int64_t field_discriminant(std::int64_t squarefree_d);

// Splitting type of p in Q(sqrt(D)): +1 split, -1 inert, 0 ramified.
int prime_splitting(std::int64_t squarefree_d, std::uint64_t p);

// a_d(n) for d <= limit, computed multiplicatively from prime splitting.
// field_disc = 1 for Q.  Throws for unsupported fields.
IdealCountTable ideal_norm_counts(std::int64_t field_disc,
                                  std::uint64_t level_norm,
                                  std::uint64_t limit);

// gamma_{-1}^{(n)}(Q) = 2 Res_{u=0} zeta^{(n)}(2u+1) = prod_{p|n}(1 - 1/p).
Real gamma_minus_one(std::uint64_t level_norm);

// Least-squares slope of X -> sum_{d<=X} a_d over a grid of X values;
// estimates Res_{s=1} zeta_F(s).
Real dedekind_residue_estimate(const IdealCountTable& table);
Real dedekind_residue_estimate(std::int64_t field_disc, std::uint64_t limit);

// zeta_F(s) as a truncated Euler product over rational primes p <= pmax.
// Used as an independent check against the coefficient tables.
Real dedekind_zeta_euler(std::int64_t field_disc, Real s, std::uint64_t pmax);

// Primes up to n (simple sieve).
std::vector<std::uint64_t> primes_up_to(std::uint64_t n);

}  // namespace rslab
