#pragma once

#include <string>
#include <vector>

#include "rslab/modforms.hpp"
#include "rslab/rankin.hpp"
#include "rslab/types.hpp"

namespace rslab {

struct PeterssonCheck {
  Real lhs = 0.0L;
  Real rhs = 0.0L;
  Real gap = 0.0L;
};

// Both sides of the weight-k trace formula at (m, n):
//   sum_f omega_f lambda_f(m) lambda_f(n)
//     = (pi/3) [ delta_{mn}
//                + 2 pi i^{-k} sum_{c <= c_max} S(m,n;c) c^{-1}
//                                J_{k-1}(4 pi sqrt(mn) / c) ],
// with omega_f the covolume-normalized harmonic weight attached to the
// basis.  i^{-k} = (-1)^{k/2} for even k.  The c-tail decays like
// (2 pi sqrt(mn) / c)^{k-1} / (k-1)! once the order dominates the
// argument; the caller picks c_max accordingly (40 is ample for
// m, n <= 4).  Throws if a basis form lacks its harmonic weight or the
// coefficients m, n.
PeterssonCheck petersson_check(int weight, long m, long n, long c_max,
                               const std::vector<Eigenform>& basis);

// Measured normalization constant: the ratio lhs / bracket at
// (m, n) = (1, 1) for each listed weight, where bracket is the
// trace-formula right side without its covolume prefactor.  Asserts the
// ratio is constant across weights to `tolerance` relative and returns
// the first value; the analytic prediction is the covolume pi/3.
// Throws when the spread exceeds the tolerance.
Real calibrate_normalization(const std::vector<int>& weights,
                             long c_max = 40, Real tolerance = 1e-8L);

struct PerFormEntry {
  int f_index = 0;
  Real omega = 0.0L;          // harmonic weight
  Real central_value = 0.0L;  // pole-corrected L(1/2, f x g)
  Real smoothed_value = 0.0L; // shared-cutoff smoothed sum (identity side)
};

// Per-weight record of the first-moment identity, the plain second
// moment, and the nonvanishing count, with g the index-0 eigenform of
// the same weight.
struct MomentReport {
  int weight = 0;
  std::string g_spec;
  std::vector<PerFormEntry> per_form;
  Real first_moment_harmonic = 0.0L;  // sum_f omega_f * smoothed_value
  Real main_term = 0.0L;              // M_g(k), diagonal d-series
  Real error_term_direct = 0.0L;      // E_g(k), Kloosterman/Bessel series
  Real identity_gap = 0.0L;           // |first moment - (M + E)|
  Real second_moment_plain = 0.0L;    // sum_f central_value^2
  int nonvanishing_count = 0;
  Real threshold = 0.0L;
  Real comparison_curve = 0.0L;       // k / (log k)^{curve_exponent}
  Real max_k_omega_over_log_k = 0.0L;
  Real calibration_const = 0.0L;      // measured ratio at (1, 1)
  long identity_cutoff = 0;           // shared truncation m d^2 <= X
  long value_terms = 0;               // terms behind the central values
};

struct MomentOptions {
  // Shared (m, d) truncation of the identity: the harmonic average,
  // M_g, and E_g all run over m d^2 <= identity_cutoff, so the identity
  // holds termwise at any cutoff.
  long identity_cutoff = 1000;
  // Kernel tail tolerance behind the reported central values.
  Real value_tolerance = 1e-6L;
  Real threshold = 1e-10L;
  Real curve_exponent = 2.0L;
  Real norm_tolerance = 1e-11L;
  // Per-term weight at which the adaptive c-sum of E_g stops.
  Real kloosterman_tail = 1e-11L;
};

// The first-moment identity
//   sum_f omega_f L(1/2, f x g)
//     = M_g(k) + E_g(k),
//   M_g(k) = 2 (pi/3) sum_d V(4 pi^2 d^2) / d,
//   E_g(k) = 2 (pi/3) 2 pi i^{-k} sum_m (lambda_g(m)/sqrt(m))
//              sum_d V(4 pi^2 m d^2) / d
//              sum_c S(m,1;c) c^{-1} J_{k-1}(4 pi sqrt(m) / c),
// evaluated with one shared truncation on both sides, plus the moment
// and count statistics.  g is forms[0] of the weight.  A weight with no
// cusp forms yields an all-zero report with g_spec "none".
MomentReport moment_report(int weight, const MomentOptions& opt = {});

// Variant running on a caller-supplied basis (e.g. from the eigenform
// cache); forms must carry harmonic weights and at least
// moment_coeff_need(weight, opt) coefficients.
MomentReport moment_report(int weight, const std::vector<Eigenform>& forms,
                           const MomentOptions& opt = {});

// Coefficient range the report needs: max of the identity cutoff and
// the kernel cutoff behind the reported central values.
long moment_coeff_need(int weight, const MomentOptions& opt = {});

// Ordered sweep; deterministic at fixed options.
std::vector<MomentReport> moment_sweep(const std::vector<int>& weights,
                                       const MomentOptions& opt = {});

struct OmegaBoundRow {
  int weight = 0;
  Real max_omega = 0.0L;
  Real k_omega_over_log_k = 0.0L;  // max_f omega_f * k / log k
};

// Empirical check of the harmonic-weight decay omega_f << log k / k:
// per weight the largest omega and the normalized product, whose
// running maximum is the measured implied constant.  Weights with no
// cusp forms are skipped.
std::vector<OmegaBoundRow> omega_bound_check(const std::vector<int>& weights);

// CSV columns: k, dim, g_id, first_moment_harmonic, main_term,
// error_term, second_moment, nonvanishing_count, max_k_omega_over_logk,
// calibration_const.  JSON mirror carries full-precision decimal text
// plus the per-form entries.
std::string moment_csv(const std::vector<MomentReport>& reports);
std::string moment_json(const std::vector<MomentReport>& reports);

}  // namespace rslab
