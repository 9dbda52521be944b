#include "rslab/moments.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rslab/kloosterman.hpp"
#include "rslab/specfun.hpp"

namespace rslab {

namespace {

constexpr Real kFourPiSq = 4.0L * kPi * kPi;

// i^{-k} for even k.
Real quarter_power_sign(int weight) {
  if (weight % 2)
    throw std::invalid_argument("quarter_power_sign: weight must be even");
  return (weight % 4 == 0) ? 1.0L : -1.0L;
}

std::string real_text(Real v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.25Le", v);
  return buf;
}

Real lambda_at(const Eigenform& f, long n, const char* who) {
  if (n < 1 || n > f.coeff_limit())
    throw std::invalid_argument(std::string(who) +
                                ": coefficient index out of range");
  return f.normalized[static_cast<size_t>(n)];
}

// sum_{c <= c_max} S(m,n;c) c^{-1} J_{k-1}(4 pi sqrt(mn) / c)
Real kloosterman_bessel_sum(int weight, long m, long n, long c_max) {
  Real root = 4.0L * kPi * std::sqrt(Real(m) * Real(n));
  Real total = 0.0L;
  for (long c = 1; c <= c_max; ++c)
    total += kloosterman_z(m, n, c) / Real(c) *
             bessel_j(weight - 1, root / Real(c));
  return total;
}

// Adaptive variant for E_g: stops once the first-term Bessel bound
// (x/2)^{k-1} / (k-1)!, valid in the decay regime x < (k-1)/2, weighted
// by |coeff| and a c-factor covering the geometric tail, drops below
// the requested size.
Real kloosterman_bessel_sum_adaptive(int weight, long m, Real coeff_size,
                                     Real tail_weight) {
  Real root = 4.0L * kPi * std::sqrt(Real(m));
  Real nu = Real(weight) - 1.0L;
  Real log_fact = log_gamma(Real(weight));
  Real total = 0.0L;
  const long c_cap = 20000;
  for (long c = 1; c <= c_cap; ++c) {
    Real x = root / Real(c);
    total +=
        kloosterman_z(m, 1, c) / Real(c) * bessel_j(weight - 1, x);
    if (2.0L * x < nu) {
      Real log_bound = nu * std::log(0.5L * x) - log_fact;
      if (coeff_size * Real(c) * std::exp(log_bound) < tail_weight)
        return total;
    }
  }
  throw std::runtime_error(
      "kloosterman_bessel_sum_adaptive: c-sum failed to settle by c = " +
      std::to_string(c_cap));
}

void require_norms(const std::vector<Eigenform>& basis, const char* who) {
  for (const auto& f : basis)
    if (f.harmonic_weight == 0.0L)
      throw std::invalid_argument(std::string(who) +
                                  ": basis lacks harmonic weights");
}

}  // namespace

PeterssonCheck petersson_check(int weight, long m, long n, long c_max,
                               const std::vector<Eigenform>& basis) {
  if (m < 1 || n < 1 || c_max < 1)
    throw std::invalid_argument("petersson_check: m, n, c_max must be >= 1");
  require_norms(basis, "petersson_check");
  PeterssonCheck out;
  for (const auto& f : basis) {
    if (f.weight != weight)
      throw std::invalid_argument("petersson_check: basis weight mismatch");
    out.lhs += f.harmonic_weight * lambda_at(f, m, "petersson_check") *
               lambda_at(f, n, "petersson_check");
  }
  Real bracket = (m == n ? 1.0L : 0.0L) +
                 kTwoPi * quarter_power_sign(weight) *
                     kloosterman_bessel_sum(weight, m, n, c_max);
  out.rhs = kModularCovolume * bracket;
  out.gap = std::fabs(out.lhs - out.rhs);
  return out;
}

Real calibrate_normalization(const std::vector<int>& weights, long c_max,
                             Real tolerance) {
  if (weights.empty())
    throw std::invalid_argument("calibrate_normalization: empty weight list");
  std::vector<Real> ratios;
  for (int k : weights) {
    auto forms = eigenforms(k, 400);
    attach_norms(forms, 1e-11L);
    Real lhs = 0.0L;
    for (const auto& f : forms) lhs += f.harmonic_weight;
    Real bracket = 1.0L + kTwoPi * quarter_power_sign(k) *
                              kloosterman_bessel_sum(k, 1, 1, c_max);
    ratios.push_back(lhs / bracket);
  }
  for (Real r : ratios)
    if (std::fabs(r - ratios.front()) > tolerance * std::fabs(ratios.front()))
      throw std::runtime_error(
          "calibrate_normalization: ratio drifts across weights");
  return ratios.front();
}

long moment_coeff_need(int weight, const MomentOptions& opt) {
  AfeOptions value_opt;
  value_opt.tail_tolerance = opt.value_tolerance;
  return std::max(opt.identity_cutoff, central_value_terms(weight, value_opt));
}

MomentReport moment_report(int weight, const std::vector<Eigenform>& forms,
                           const MomentOptions& opt) {
  if (opt.identity_cutoff < 4)
    throw std::invalid_argument("moment_report: identity_cutoff too small");
  MomentReport rep;
  rep.weight = weight;
  rep.threshold = opt.threshold;
  rep.identity_cutoff = opt.identity_cutoff;
  rep.comparison_curve =
      Real(weight) / std::pow(std::log(Real(weight)), opt.curve_exponent);
  if (forms.empty()) {
    rep.g_spec = "none";
    return rep;
  }
  rep.g_spec = "k" + std::to_string(weight) + "e0";
  require_norms(forms, "moment_report");

  AfeOptions value_opt;
  value_opt.tail_tolerance = opt.value_tolerance;
  rep.value_terms = central_value_terms(weight, value_opt);
  long coeff_need = std::max(rep.identity_cutoff, rep.value_terms);
  if (forms.front().coeff_limit() < coeff_need)
    throw std::invalid_argument("moment_report: basis needs " +
                                std::to_string(coeff_need) + " coefficients");
  const Eigenform& g = forms.front();

  // Normalized kernel V(y) shared by every piece of the identity.
  AfeKernel kernel(weight, 0.5L, 1.5L);
  Real norm = std::exp(-(log_gamma(0.5L) + log_gamma(Real(weight) - 0.5L)));
  const long X = rep.identity_cutoff;
  std::vector<Real> v_at(static_cast<size_t>(X) + 1, 0.0L);
  for (long j = 1; j <= X; ++j)
    v_at[static_cast<size_t>(j)] = kernel(kFourPiSq * Real(j)) * norm;

  for (size_t i = 0; i < forms.size(); ++i) {
    const Eigenform& f = forms[i];
    PerFormEntry entry;
    entry.f_index = f.eigenvalue_index;
    entry.omega = f.harmonic_weight;

    RSContext full = make_rs_context(f, g);
    entry.central_value = central_l_value(full, value_opt);

    RSContext truncated = make_rs_context(f, g, static_cast<int>(X));
    auto b = rs_dirichlet_coefficients(truncated);
    Real smoothed = 0.0L;
    for (long j = 1; j <= X; ++j)
      smoothed += b[static_cast<size_t>(j)] / std::sqrt(Real(j)) *
                  v_at[static_cast<size_t>(j)];
    entry.smoothed_value = 2.0L * smoothed;

    rep.first_moment_harmonic += entry.omega * entry.smoothed_value;
    rep.second_moment_plain += entry.central_value * entry.central_value;
    if (std::fabs(entry.central_value) > opt.threshold)
      ++rep.nonvanishing_count;
    rep.max_k_omega_over_log_k =
        std::max(rep.max_k_omega_over_log_k,
                 entry.omega * Real(weight) / std::log(Real(weight)));
    rep.per_form.push_back(entry);
  }

  for (long d = 1; d * d <= X; ++d)
    rep.main_term += v_at[static_cast<size_t>(d * d)] / Real(d);
  rep.main_term *= 2.0L * kModularCovolume;

  Real error_sum = 0.0L;
  for (long m = 1; m <= X; ++m) {
    Real coeff = lambda_at(g, m, "moment_report") / std::sqrt(Real(m));
    Real d_series = 0.0L;
    for (long d = 1; m * d * d <= X; ++d)
      d_series += v_at[static_cast<size_t>(m * d * d)] / Real(d);
    coeff *= d_series;
    if (coeff == 0.0L) continue;
    error_sum += coeff * kloosterman_bessel_sum_adaptive(
                             weight, m, std::fabs(coeff), opt.kloosterman_tail);
  }
  rep.error_term_direct = 2.0L * kModularCovolume * kTwoPi *
                          quarter_power_sign(weight) * error_sum;

  rep.identity_gap = std::fabs(rep.first_moment_harmonic -
                               (rep.main_term + rep.error_term_direct));

  // Measured normalization ratio from this basis at (m, n) = (1, 1).
  Real lhs = 0.0L;
  for (const auto& f : forms) lhs += f.harmonic_weight;
  Real bracket = 1.0L + kTwoPi * quarter_power_sign(weight) *
                            kloosterman_bessel_sum(weight, 1, 1, 60);
  rep.calibration_const = lhs / bracket;
  return rep;
}

MomentReport moment_report(int weight, const MomentOptions& opt) {
  if (opt.identity_cutoff < 4)
    throw std::invalid_argument("moment_report: identity_cutoff too small");
  auto forms =
      eigenforms(weight, static_cast<int>(moment_coeff_need(weight, opt)));
  attach_norms(forms, opt.norm_tolerance);
  return moment_report(weight, forms, opt);
}

std::vector<MomentReport> moment_sweep(const std::vector<int>& weights,
                                       const MomentOptions& opt) {
  std::vector<MomentReport> out;
  out.reserve(weights.size());
  for (int k : weights) out.push_back(moment_report(k, opt));
  return out;
}

std::vector<OmegaBoundRow> omega_bound_check(const std::vector<int>& weights) {
  std::vector<OmegaBoundRow> rows;
  for (int k : weights) {
    auto forms = eigenforms(k, 400);
    if (forms.empty()) continue;
    attach_norms(forms, 1e-11L);
    OmegaBoundRow row;
    row.weight = k;
    for (const auto& f : forms)
      row.max_omega = std::max(row.max_omega, f.harmonic_weight);
    row.k_omega_over_log_k = row.max_omega * Real(k) / std::log(Real(k));
    rows.push_back(row);
  }
  return rows;
}

std::string moment_csv(const std::vector<MomentReport>& reports) {
  std::string out =
      "k,dim,g_id,first_moment_harmonic,main_term,error_term,"
      "second_moment,nonvanishing_count,max_k_omega_over_logk,"
      "calibration_const\r\n";
  char buf[256];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf,
                  "%d,%zu,%s,%.21Le,%.21Le,%.21Le,%.21Le,%d,%.21Le,%.21Le\r\n",
                  r.weight, r.per_form.size(), r.g_spec.c_str(),
                  r.first_moment_harmonic, r.main_term, r.error_term_direct,
                  r.second_moment_plain, r.nonvanishing_count,
                  r.max_k_omega_over_log_k, r.calibration_const);
    out += buf;
  }
  return out;
}

std::string moment_json(const std::vector<MomentReport>& reports) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json jr;
    jr["weight"] = r.weight;
    jr["g_spec"] = r.g_spec;
    jr["first_moment_harmonic"] = real_text(r.first_moment_harmonic);
    jr["main_term"] = real_text(r.main_term);
    jr["error_term_direct"] = real_text(r.error_term_direct);
    jr["identity_gap"] = real_text(r.identity_gap);
    jr["second_moment_plain"] = real_text(r.second_moment_plain);
    jr["nonvanishing_count"] = r.nonvanishing_count;
    jr["threshold"] = real_text(r.threshold);
    jr["comparison_curve"] = real_text(r.comparison_curve);
    jr["max_k_omega_over_log_k"] = real_text(r.max_k_omega_over_log_k);
    jr["calibration_const"] = real_text(r.calibration_const);
    jr["identity_cutoff"] = r.identity_cutoff;
    jr["value_terms"] = r.value_terms;
    jr["per_form"] = nlohmann::json::array();
    for (const auto& e : r.per_form) {
      nlohmann::json je;
      je["f_index"] = e.f_index;
      je["omega"] = real_text(e.omega);
      je["central_value"] = real_text(e.central_value);
      je["smoothed_value"] = real_text(e.smoothed_value);
      jr["per_form"].push_back(je);
    }
    doc.push_back(jr);
  }
  return doc.dump(2) + "\n";
}

}  // namespace rslab
