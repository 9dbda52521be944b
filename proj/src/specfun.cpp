#include "rslab/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace rslab {

namespace {

// B_{2j} for j = 1..12.
constexpr Real kBernoulli[] = {
    1.0L / 6.0L,        -1.0L / 30.0L,      1.0L / 42.0L,
    -1.0L / 30.0L,      5.0L / 66.0L,       -691.0L / 2730.0L,
    7.0L / 6.0L,        -3617.0L / 510.0L,  43867.0L / 798.0L,
    -174611.0L / 330.0L, 854513.0L / 138.0L, -236364091.0L / 2730.0L};

constexpr Real kLogTwoPi = 1.83787706640934548356065947281123527L;

bool is_nonpositive_integer(Complex z) {
  return z.imag() == 0.0L && z.real() <= 0.0L &&
         z.real() == std::floor(z.real());
}

Complex log_gamma_stirling(Complex z) {
  Complex result = (z - 0.5L) * std::log(z) - z + 0.5L * kLogTwoPi;
  Complex zinv2 = 1.0L / (z * z);
  Complex zpow = 1.0L / z;
  for (int j = 1; j <= 12; ++j) {
    result += kBernoulli[j - 1] / Real(2 * j * (2 * j - 1)) * zpow;
    zpow *= zinv2;
  }
  return result;
}

}  // namespace

Complex log_gamma(Complex z) {
  if (is_nonpositive_integer(z))
    throw std::invalid_argument("log_gamma: pole at non-positive integer");
  if (z.real() < 0.5L) {
    // Reflection; the sine stays representable for the contour heights
    // used in this project (|Im z| < ~10).
    Complex s = std::sin(kPi * z);
    return std::log(kPi) - std::log(s) - log_gamma(1.0L - z);
  }
  Complex shift_log = 0.0L;
  Complex w = z;
  while (std::abs(w) < 20.0L) {
    shift_log += std::log(w);
    w += 1.0L;
  }
  return log_gamma_stirling(w) - shift_log;
}

Real log_gamma(Real x) {
  if (x <= 0.0L && x == std::floor(x))
    throw std::invalid_argument("log_gamma: pole at non-positive integer");
  if (x > 0.0L) return std::lgamma(x);
  return log_gamma(Complex(x, 0.0L)).real();
}

Complex riemann_zeta(Complex s) {
  if (s == Complex(1.0L, 0.0L))
    throw std::invalid_argument("riemann_zeta: pole at s = 1");
  const int N = 28;
  Complex sum = 0.0L;
  for (int n = 1; n < N; ++n) sum += std::exp(-s * std::log(Real(n)));
  Complex nls = std::exp(-s * std::log(Real(N)));
  sum += Real(N) * nls / (s - 1.0L);
  sum += 0.5L * nls;
  // Euler-Maclaurin correction terms.
  Complex rising = s;  // s (s+1) ... (s+2j-2)
  Real fact = 2.0L;    // (2j)!
  Complex npow = nls / Real(N);  // N^{-s-2j+1}
  for (int j = 1; j <= 12; ++j) {
    sum += kBernoulli[j - 1] / fact * rising * npow;
    rising *= (s + Real(2 * j - 1)) * (s + Real(2 * j));
    fact *= Real(2 * j + 1) * Real(2 * j + 2);
    npow /= Real(N) * Real(N);
  }
  return sum;
}

Real riemann_zeta(Real s) { return riemann_zeta(Complex(s, 0.0L)).real(); }

Complex completed_zeta(Complex s) {
  if (std::abs(s) < 1e-12L || std::abs(s - Complex(1.0L)) < 1e-12L)
    throw std::invalid_argument("completed_zeta: pole at s = 0, 1");
  if (s.real() < 0.5L) return completed_zeta(Complex(1.0L) - s);
  return std::exp(-0.5L * s * std::log(kPi) + log_gamma(0.5L * s)) *
         riemann_zeta(s);
}

Real completed_zeta(Real s) {
  if (s == 0.0L || s == 1.0L)
    throw std::invalid_argument("completed_zeta: pole at s = 0, 1");
  if (s < 0.5L) return completed_zeta(1.0L - s);  // xi(s) = xi(1-s)
  return std::pow(kPi, -0.5L * s) * std::exp(std::lgamma(0.5L * s)) *
         riemann_zeta(s);
}

Real bessel_j_series(Real nu, Real x, int prec_bits) {
  if (x < 0.0L || nu < 0.0L)
    throw std::invalid_argument("bessel_j_series: need nu, x >= 0");
  if (x == 0.0L) return nu == 0.0L ? 1.0L : 0.0L;
  if (x > 2.0L * nu + 34.0L)
    throw std::invalid_argument(
        "bessel_j_series: x too large for the series budget");
  const Real tol = std::ldexp(1.0L, -prec_bits - 8);
  Real half_x = 0.5L * x;
  Real term = std::exp(nu * std::log(half_x) - std::lgamma(nu + 1.0L));
  Real sum = term;
  Real max_abs = std::fabs(term);
  for (int j = 0; j < 400; ++j) {
    term *= -half_x * half_x / ((j + 1.0L) * (nu + j + 1.0L));
    sum += term;
    max_abs = std::max(max_abs, std::fabs(term));
    if (std::fabs(term) < tol * std::max(std::fabs(sum), max_abs * 1e-18L) &&
        Real(j) > half_x)
      break;
  }
  if (max_abs * std::ldexp(1.0L, -62) > std::fabs(sum) * 1e-4L &&
      std::fabs(sum) > 0.0L)
    throw std::runtime_error("bessel_j_series: cancellation exceeds budget");
  return sum;
}

Real bessel_j_mellin_barnes(Real nu, Real x, Real sigma, int prec_bits) {
  if (!(sigma > 0.0L && sigma < nu))
    throw std::invalid_argument(
        "bessel_j_mellin_barnes: contour must satisfy 0 < sigma < nu");
  if (x <= 0.0L) throw std::invalid_argument("bessel_j_mellin_barnes: x > 0");
  const Real tol = std::ldexp(1.0L, -prec_bits - 4);
  // Rough magnitude of J_nu(x) itself: the leading series term below the
  // turning point, the oscillatory envelope above it.  The tail cutoff
  // must be measured against this, not against 1, because for x << nu
  // the contour integral is exponentially smaller than its integrand.
  Real log_scale = (x < nu) ? nu * std::log(0.5L * x) - std::lgamma(nu + 1.0L)
                            : -0.5L * std::log(x);
  // Integrand tail decays like (x/2)^sigma (t/2)^{-sigma-1}; pick T so
  // the remaining mass is below tol * scale.
  Real T = x * std::exp(-(std::log(tol * kTwoPi * sigma) + log_scale) / sigma);
  T = std::min(std::max(T, 40.0L), 5e5L);
  Real strip = std::min(sigma, nu - sigma);
  Real h = kTwoPi * strip / ((prec_bits + 10) * 0.6931471805599453L);
  h = std::min(h, 0.25L);

  Real log_half_x = std::log(0.5L * x);
  auto integrand = [&](Real t) -> Complex {
    Complex s(sigma, t);
    Complex lg = log_gamma(0.5L * (nu - s)) - log_gamma(0.5L * (nu + s) + 1.0L);
    return std::exp(lg + s * log_half_x);
  };
  Real sum = 0.5L * integrand(0.0L).real();
  for (Real t = h; t <= T; t += h) sum += integrand(t).real();
  return sum * h / kTwoPi;  // (1/4 pi i) ds with both half-lines folded
}

namespace {

// Hankel asymptotic expansion for J_n(x), x >= ~17.
Real bessel_j_asymptotic(int n, Real x) {
  Real mu = 4.0L * Real(n) * Real(n);
  Real p = 1.0L, q = 0.0L;
  Real term = 1.0L;
  Real prev = 1e30L;
  for (int k = 1; k <= 40; ++k) {
    term *= (mu - Real(2 * k - 1) * Real(2 * k - 1)) / (Real(k) * 8.0L * x);
    if (std::fabs(term) > prev) break;  // past the smallest term
    prev = std::fabs(term);
    int phase = k % 4;
    if (phase == 1)
      q += term;
    else if (phase == 2)
      p -= term;
    else if (phase == 3)
      q -= term;
    else
      p += term;
    if (std::fabs(term) < 1e-22L) break;
  }
  Real chi = x - (2 * n + 1) * kPi / 4.0L;
  return std::sqrt(2.0L / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

// Miller downward recurrence with the sum normalization
// J_0 + 2 J_2 + 2 J_4 + ... = 1; used when x < n.
Real bessel_j_miller(int n, Real x) {
  int start = std::max(n, static_cast<int>(x)) + 90;
  if (start % 2) ++start;
  Real jp = 0.0L, jc = 1e-300L;
  Real norm = 0.0L, value = 0.0L;
  for (int m = start; m >= 1; --m) {
    Real jm = 2.0L * Real(m) / x * jc - jp;
    jp = jc;
    jc = jm;
    if (m - 1 == n) value = jc;
    if ((m - 1) % 2 == 0) norm += (m - 1 == 0) ? jc : 2.0L * jc;
    if (std::fabs(jc) > 1e280L) {
      jc *= 1e-280L;
      jp *= 1e-280L;
      norm *= 1e-280L;
      value *= 1e-280L;
    }
  }
  return value / norm;
}

}  // namespace

Real bessel_j(int n, Real x) {
  if (n < 0) throw std::invalid_argument("bessel_j: order must be >= 0");
  if (x < 0.0L) throw std::invalid_argument("bessel_j: x must be >= 0");
  if (x == 0.0L) return n == 0 ? 1.0L : 0.0L;
  if (x < Real(n)) return bessel_j_miller(n, x);
  if (x < 17.0L) return bessel_j_series(Real(n), x);
  if (n <= 1) return bessel_j_asymptotic(n, x);
  // Forward recurrence, stable since the order stays below x.
  Real jp = bessel_j_asymptotic(0, x);
  Real jc = bessel_j_asymptotic(1, x);
  for (int m = 1; m < n; ++m) {
    Real jn = 2.0L * Real(m) / x * jc - jp;
    jp = jc;
    jc = jn;
  }
  return jc;
}

Real bessel_k(Real nu, Real x, int prec_bits) {
  if (x <= 0.0L) throw std::invalid_argument("bessel_k: x must be > 0");
  const Real tol = std::ldexp(1.0L, -prec_bits - 10);
  const Real h = 1.0L / 32.0L;
  Real sum = 0.5L * std::exp(-x);  // t = 0 term: e^{-x} cosh(0)
  for (Real t = h;; t += h) {
    Real f = std::exp(-x * std::cosh(t)) * std::cosh(nu * t);
    sum += f;
    if (f < tol * sum && t > 2.0L) break;
    if (t > 60.0L) break;
  }
  return sum * h;
}

Complex bessel_k(Complex nu, Real x, int prec_bits) {
  if (x <= 0.0L) throw std::invalid_argument("bessel_k: x must be > 0");
  const Real tol = std::ldexp(1.0L, -prec_bits - 10);
  const Real h = 1.0L / 32.0L;
  Complex sum = 0.5L * std::exp(-x);
  for (Real t = h;; t += h) {
    Complex f = std::exp(-x * std::cosh(t)) * std::cosh(nu * t);
    sum += f;
    if (std::abs(f) < tol * std::abs(sum) && t > 2.0L) break;
    if (t > 60.0L) break;
  }
  return sum * h;
}

void VProfile::validate() const {
  if (weights.empty())
    throw std::invalid_argument("VProfile: empty weight vector");
  for (int k : weights)
    if (k < 4 || k % 2)
      throw std::invalid_argument("VProfile: weights must be even and >= 4");
  if (!(contour_abscissa > 0.0L))
    throw std::invalid_argument("VProfile: contour must have sigma > 0");
  Real T = truncation_height;
  if (T > 0.0L) {
    Real log2tail =
        (contour_abscissa * contour_abscissa - T * T) / 0.6931471805599453L;
    if (log2tail > -Real(target_precision + 8))
      throw std::invalid_argument("VProfile: truncation height too small");
  }
}

VProfile make_vprofile(std::vector<int> weights, int prec_bits) {
  VProfile profile;
  profile.weights = std::move(weights);
  profile.target_precision = prec_bits;
  Real sigma = profile.contour_abscissa;
  profile.truncation_height =
      std::sqrt(sigma * sigma + (prec_bits + 10) * 0.6931471805599453L) + 0.5L;
  profile.validate();
  return profile;
}

Real v_half(Real y, const VProfile& profile) {
  profile.validate();
  if (!(y > 0.0L)) throw std::invalid_argument("v_half: y must be > 0");
  const Real sigma = profile.contour_abscissa;
  const Real h = profile.step;
  Real T = profile.truncation_height;
  if (T <= 0.0L) {
    T = std::sqrt(sigma * sigma +
                  (profile.target_precision + 10) * 0.6931471805599453L) +
        0.5L;
  }
  Real norm = 0.0L;  // log of prod Gamma(1/2) Gamma(k_j - 1/2)
  for (int k : profile.weights)
    norm += std::lgamma(0.5L) + std::lgamma(Real(k) - 0.5L);
  const Real log_y = std::log(y);
  auto integrand = [&](Real t) -> Real {
    Complex u(sigma, t);
    Complex lg = 0.0L;
    for (int k : profile.weights)
      lg += log_gamma(0.5L + u) + log_gamma(Real(k) - 0.5L + u);
    Complex f = std::exp(lg - norm + u * u - u * log_y) / u;
    return f.real();
  };
  Real sum = 0.5L * integrand(0.0L);
  for (Real t = h; t <= T; t += h) sum += integrand(t);
  return sum * h / kPi;
}

AfeKernel::AfeKernel(int weight, Real base, Real sigma, int prec_bits,
                     Real step, Real test_scale)
    : sigma_(sigma), step_(step) {
  if (!(sigma > 0.0L)) throw std::invalid_argument("AfeKernel: sigma > 0");
  if (!(test_scale > 0.0L))
    throw std::invalid_argument("AfeKernel: test_scale > 0");
  Real T = std::sqrt(sigma * sigma +
                     (prec_bits + 10) * 0.6931471805599453L / test_scale) +
           0.5L;
  for (Real t = 0.0L; t <= T; t += step) {
    Complex u(sigma, t);
    Complex lg = log_gamma(base + u) + log_gamma(base + Real(weight) - 1.0L + u);
    Complex w = std::exp(lg + test_scale * u * u) / u * (step / kTwoPi);
    heights_.push_back(t);
    node_weight_.push_back(w);
    node_mass_ += (t == 0.0L ? 1.0L : 2.0L) * std::abs(w);
  }
}

Real AfeKernel::operator()(Real y) const {
  if (!(y > 0.0L)) throw std::invalid_argument("AfeKernel: y must be > 0");
  const Real log_y = std::log(y);
  const Real ys = std::exp(-sigma_ * log_y);
  Real sum = 0.0L;
  for (std::size_t i = 0; i < heights_.size(); ++i) {
    Real t = heights_[i];
    // y^{-u} = y^{-sigma} e^{-i t log y}
    Complex rot(std::cos(t * log_y), -std::sin(t * log_y));
    Real contribution = (node_weight_[i] * rot).real() * ys;
    sum += (t == 0.0L) ? contribution : 2.0L * contribution;
  }
  return sum;
}

}  // namespace rslab
