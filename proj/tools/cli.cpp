// Command-line driver: builds eigenform caches, runs the sweeps, and
// emits the CSV/JSON reports and verification summaries.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rslab/arith.hpp"
#include "rslab/kloosterman.hpp"
#include "rslab/modforms.hpp"
#include "rslab/moments.hpp"
#include "rslab/rankin.hpp"
#include "rslab/specfun.hpp"

using namespace rslab;

namespace {

std::string real_text(Real v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.21Le", v);
  return buf;
}

// Inclusive start:stop:step weight range (or a single weight).
std::vector<int> parse_weights(const std::string& text) {
  std::vector<long> parts;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t colon = text.find(':', pos);
    std::string piece = text.substr(
        pos, colon == std::string::npos ? std::string::npos : colon - pos);
    size_t used = 0;
    long value = 0;
    try {
      value = std::stol(piece, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed weight range: " + text);
    }
    if (used != piece.size())
      throw std::invalid_argument("malformed weight range: " + text);
    parts.push_back(value);
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  long start = parts.at(0);
  long stop = parts.size() > 1 ? parts.at(1) : start;
  long step = parts.size() > 2 ? parts.at(2) : 2;
  if (parts.size() > 3 || stop < start || step <= 0)
    throw std::invalid_argument("malformed weight range: " + text);
  std::vector<int> weights;
  for (long k = start; k <= stop; k += step) {
    if (k < 4 || k % 2)
      throw std::invalid_argument("weights must be even and >= 4, got " +
                                  std::to_string(k));
    weights.push_back(static_cast<int>(k));
  }
  return weights;
}

struct CacheConfig {
  std::string dir;
  int precision = 64;
  bool strict = false;
};

std::string cache_path(const CacheConfig& cache, int weight) {
  return cache.dir + "/eigen_k" + std::to_string(weight) + "_p" +
         std::to_string(cache.precision) + ".json";
}

// Load the weight's cache when it is present, precision-compatible
// (encoded in the file name), and long enough; otherwise regenerate and
// rewrite it, or fail under --strict.
std::vector<Eigenform> cached_forms(const CacheConfig& cache, int weight,
                                    long coeffs) {
  std::string path = cache_path(cache, weight);
  if (std::filesystem::exists(path)) {
    auto forms = load_eigenforms(path);
    if (forms.empty() || forms.front().coeff_limit() >= coeffs) return forms;
    if (cache.strict)
      throw std::runtime_error("cache " + path + " holds only " +
                               std::to_string(forms.front().coeff_limit()) +
                               " coefficients, need " +
                               std::to_string(coeffs));
  } else if (cache.strict) {
    throw std::runtime_error("cache " + path + " missing under --strict");
  }
  auto forms = eigenforms(weight, static_cast<int>(coeffs), cache.precision);
  attach_norms(forms, 1e-11L);
  std::filesystem::create_directories(cache.dir);
  save_eigenforms(path, forms, cache.precision);
  return forms;
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + out_path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

int fail_json(const std::string& command, const std::string& message,
              int code) {
  nlohmann::json err;
  err["error"]["command"] = command;
  err["error"]["message"] = message;
  std::cerr << err.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"number-theory desk scale: eigenforms, L-values, moments"};
  app.require_subcommand(1);
  app.fallthrough();

  CacheConfig cache;
  const char* env_dir = std::getenv("RSLAB_CACHE_DIR");
  cache.dir = env_dir ? env_dir : "cache";
  int threads = 1;
  std::string out_path;
  app.add_option("--cache-dir", cache.dir,
                 "eigenform cache directory (env RSLAB_CACHE_DIR)");
  app.add_option("--precision", cache.precision, "working precision in bits")
      ->check(CLI::Range(64, 256));
  app.add_flag("--strict", cache.strict,
               "fail instead of regenerating an unusable cache");
  app.add_option("--threads", threads,
                 "parallelism cap (results are thread-count independent)")
      ->check(CLI::Range(1, 256));
  app.add_option("--out", out_path, "output file (default stdout)");

  std::string active;

  // eigen: build or refresh one weight's cache.
  auto* eigen_cmd = app.add_subcommand("eigen", "build an eigenform cache");
  int eigen_weight = 12;
  long eigen_coeffs = 1000;
  eigen_cmd->add_option("--weight", eigen_weight)->required();
  eigen_cmd->add_option("--coeffs", eigen_coeffs)->check(CLI::Range(1L, 2000000L));
  eigen_cmd->callback([&] {
    active = "eigen";
    if (eigen_weight < 4 || eigen_weight % 2)
      throw std::invalid_argument("weight must be even and >= 4");
    auto forms = cached_forms(cache, eigen_weight, eigen_coeffs);
    nlohmann::json doc;
    doc["command"] = "eigen";
    doc["weight"] = eigen_weight;
    doc["dim"] = forms.size();
    doc["coeffs"] = forms.empty() ? 0 : forms.front().coeff_limit();
    doc["path"] = cache_path(cache, eigen_weight);
    write_output(out_path, doc.dump(2) + "\n");
  });

  // lvalue: central values for every pair of one weight's basis.
  auto* lvalue_cmd =
      app.add_subcommand("lvalue", "central L-values for one weight");
  int lvalue_weight = 12;
  Real lvalue_tol = 1e-8L;
  lvalue_cmd->add_option("--weight", lvalue_weight)->required();
  lvalue_cmd->add_option("--tol", lvalue_tol, "kernel tail tolerance");
  lvalue_cmd->callback([&] {
    active = "lvalue";
    AfeOptions opt;
    opt.tail_tolerance = lvalue_tol;
    long need = central_value_terms(lvalue_weight, opt);
    auto forms = cached_forms(cache, lvalue_weight, need);
    std::vector<RSContext> contexts;
    for (size_t i = 0; i < forms.size(); ++i)
      for (size_t j = i; j < forms.size(); ++j)
        contexts.push_back(make_rs_context(forms[i], forms[j]));
    write_output(out_path, central_value_csv(contexts, opt));
  });

  // moments: sweep reports.
  auto* moments_cmd = app.add_subcommand("moments", "first/second moment sweep");
  std::string moments_weights = "12:40:2";
  std::string moments_g = "auto";
  std::string moments_format = "csv";
  MomentOptions moment_opt;
  moments_cmd->add_option("--weights", moments_weights, "start:stop:step");
  moments_cmd->add_option(
      "--g", moments_g,
      "g convention label; only the weight-matched index-0 form is wired up");
  moments_cmd->add_option("--cutoff", moment_opt.identity_cutoff,
                          "shared identity truncation");
  moments_cmd->add_option("--tol", moment_opt.value_tolerance,
                          "central-value tail tolerance");
  moments_cmd->add_option("--threshold", moment_opt.threshold,
                          "nonvanishing threshold");
  moments_cmd->add_option("--format", moments_format)
      ->check(CLI::IsMember({"csv", "json"}));
  moments_cmd->callback([&] {
    active = "moments";
    std::vector<MomentReport> reports;
    for (int k : parse_weights(moments_weights)) {
      auto forms = cached_forms(cache, k, moment_coeff_need(k, moment_opt));
      reports.push_back(moment_report(k, forms, moment_opt));
    }
    write_output(out_path, moments_format == "csv" ? moment_csv(reports)
                                                   : moment_json(reports));
  });

  // petersson-check: trace-formula verification grid.
  auto* pet_cmd =
      app.add_subcommand("petersson-check", "trace formula verification");
  std::string pet_weights = "12:40:2";
  long pet_mmax = 4, pet_cmax = 60;
  Real pet_tol = 1e-8L;
  pet_cmd->add_option("--weights", pet_weights, "start:stop:step");
  pet_cmd->add_option("--mmax", pet_mmax)->check(CLI::Range(1L, 64L));
  pet_cmd->add_option("--cmax", pet_cmax)->check(CLI::Range(1L, 100000L));
  pet_cmd->add_option("--tol", pet_tol);
  pet_cmd->callback([&] {
    active = "petersson-check";
    std::string csv = "k,m,n,lhs,rhs,gap\r\n";
    Real worst = 0.0L;
    for (int k : parse_weights(pet_weights)) {
      auto forms = cached_forms(cache, k, std::max(pet_mmax, 400L));
      if (forms.empty()) continue;
      for (long m = 1; m <= pet_mmax; ++m)
        for (long n = 1; n <= pet_mmax; ++n) {
          auto pc = petersson_check(k, m, n, pet_cmax, forms);
          worst = std::max(worst, pc.gap);
          csv += std::to_string(k) + "," + std::to_string(m) + "," +
                 std::to_string(n) + "," + real_text(pc.lhs) + "," +
                 real_text(pc.rhs) + "," + real_text(pc.gap) + "\r\n";
        }
    }
    write_output(out_path, csv);
    if (worst > pet_tol)
      throw std::runtime_error("trace formula gap " + real_text(worst) +
                               " exceeds tolerance");
  });

  // kloosterman: number-field sum table.
  auto* kl_cmd =
      app.add_subcommand("kloosterman", "number-field Kloosterman table");
  long kl_disc = 5, kl_norm = 100, kl_aa = 1, kl_ab = 0;
  kl_cmd->add_option("--disc", kl_disc, "squarefree D = 1 mod 4");
  kl_cmd->add_option("--norm-limit", kl_norm)->check(CLI::Range(1L, 100000L));
  kl_cmd->add_option("--alpha-a", kl_aa, "alpha = a + b omega");
  kl_cmd->add_option("--alpha-b", kl_ab);
  kl_cmd->callback([&] {
    active = "kloosterman";
    auto field = make_field(kl_disc);
    QFElem alpha{kl_aa, kl_ab};
    write_output(out_path, kloosterman_table_csv(
                               field, alpha, static_cast<uint64_t>(kl_norm)));
  });

  // bessel-verify: Mellin-Barnes vs series J-Bessel grid.
  auto* bessel_cmd =
      app.add_subcommand("bessel-verify", "J-Bessel cross-validation grid");
  std::string bessel_weights = "12:40:4";
  Real bessel_tol = 1e-9L;
  bessel_cmd->add_option("--weights", bessel_weights, "orders are k - 1");
  bessel_cmd->add_option("--tol", bessel_tol);
  bessel_cmd->callback([&] {
    active = "bessel-verify";
    std::string csv = "nu,x,series,mellin_barnes,gap\r\n";
    Real worst = 0.0L;
    for (int k : parse_weights(bessel_weights)) {
      Real nu = Real(k) - 1.0L;
      for (Real x : {1.0L, 2.5L, 5.0L, 10.0L, 20.0L}) {
        Real a = bessel_j_series(nu, x);
        Real b = bessel_j_mellin_barnes(nu, x, 0.5L * nu);
        worst = std::max(worst, std::fabs(a - b));
        csv += real_text(nu) + "," + real_text(x) + "," + real_text(a) + "," +
               real_text(b) + "," + real_text(std::fabs(a - b)) + "\r\n";
      }
    }
    write_output(out_path, csv);
    if (worst > bessel_tol)
      throw std::runtime_error("bessel gap " + real_text(worst) +
                               " exceeds tolerance");
  });

  // eisenstein-check: one value plus invariance / growth diagnostics.
  auto* eis_cmd =
      app.add_subcommand("eisenstein-check", "Eisenstein series diagnostics");
  Real eis_sre = 1.5L, eis_sim = 0.0L, eis_zre = 0.25L, eis_zim = 1.3L;
  eis_cmd->add_option("--s-re", eis_sre);
  eis_cmd->add_option("--s-im", eis_sim);
  eis_cmd->add_option("--z-re", eis_zre);
  eis_cmd->add_option("--z-im", eis_zim)->check(CLI::PositiveNumber);
  eis_cmd->callback([&] {
    active = "eisenstein-check";
    Complex s(eis_sre, eis_sim);
    Complex z(eis_zre, eis_zim);
    EisensteinSeries series;
    series.s = s;
    Complex value = eisenstein_value(z, s, series);
    Complex flipped = eisenstein_value(-1.0L / z, s, series);
    nlohmann::json doc;
    doc["command"] = "eisenstein-check";
    doc["s"] = {real_text(s.real()), real_text(s.imag())};
    doc["z"] = {real_text(z.real()), real_text(z.imag())};
    doc["completed_value"] = {real_text(value.real()),
                              real_text(value.imag())};
    doc["inversion_residual"] = real_text(std::abs(value - flipped));
    if (s == Complex(0.5L, 0.0L)) {
      Real worst = 0.0L;
      for (Real y : {0.5L, 1.0L, 2.0L, 5.0L, 10.0L, 20.0L})
        for (Real x : {0.0L, 0.25L, 0.4L}) {
          Complex e = eisenstein_value(Complex(x, y), s, series);
          worst = std::max(worst, std::abs(e) / std::sqrt(y));
        }
      doc["sqrt_y_ratio_max"] = real_text(worst);
    }
    write_output(out_path, doc.dump(2) + "\n");
  });

  // unfold-check: quadrature vs Gamma * L formula.
  auto* unfold_cmd =
      app.add_subcommand("unfold-check", "unfolding identity verification");
  int unfold_weight = 12;
  Real unfold_s = 1.5L, unfold_tol = 1e-4L;
  long unfold_coeffs = 3200;
  int unfold_f = 0, unfold_g = 0;
  unfold_cmd->add_option("--weight", unfold_weight)->required();
  unfold_cmd->add_option("--s", unfold_s, "real s in (1, 2]");
  unfold_cmd->add_option("--tol", unfold_tol);
  unfold_cmd->add_option("--coeffs", unfold_coeffs);
  unfold_cmd->add_option("--f-index", unfold_f);
  unfold_cmd->add_option("--g-index", unfold_g);
  unfold_cmd->callback([&] {
    active = "unfold-check";
    auto forms = cached_forms(cache, unfold_weight, unfold_coeffs);
    if (unfold_f >= static_cast<int>(forms.size()) ||
        unfold_g >= static_cast<int>(forms.size()))
      throw std::invalid_argument("form index out of range for dim " +
                                  std::to_string(forms.size()));
    auto report = unfold_identity_check(forms[unfold_f], forms[unfold_g],
                                        unfold_s, unfold_tol);
    nlohmann::json doc;
    doc["command"] = "unfold-check";
    doc["weight"] = unfold_weight;
    doc["s"] = real_text(unfold_s);
    doc["lhs"] = real_text(report.lhs);
    doc["rhs"] = real_text(report.rhs);
    doc["relative_gap"] = real_text(report.relative_gap);
    write_output(out_path, doc.dump(2) + "\n");
    if (report.relative_gap > unfold_tol)
      throw std::runtime_error("unfold gap exceeds tolerance");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail_json(active.empty() ? "parse" : active, e.what(), 2);
  } catch (const std::invalid_argument& e) {
    return fail_json(active.empty() ? "parse" : active, e.what(), 2);
  } catch (const std::exception& e) {
    return fail_json(active.empty() ? "run" : active, e.what(), 1);
  }
  return 0;
}
