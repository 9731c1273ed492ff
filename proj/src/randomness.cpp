#include "rejectkit/randomness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rejectkit {
namespace {

constexpr std::int64_t kSummationLimit = 10000;
constexpr std::int64_t kExactIntegerLimit = 120;

void check_tally(std::int64_t k, std::int64_t n) {
  if (n < 0 || k < 0 || k > n) {
    throw std::domain_error("binomial tally requires 0 <= k <= n (k=" +
                            std::to_string(k) + ", n=" + std::to_string(n) +
                            ")");
  }
}

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("probability must lie in [0, 1]");
  }
}

// Sum_{i<=k} C(n,i) / 2^n with exact integer numerators. C(120,60) * 60 fits
// in 128 bits, so every intermediate below is exact.
double half_cdf_exact(std::int64_t k, std::int64_t n) {
  unsigned __int128 coeff = 1;
  unsigned __int128 sum = 1;
  for (std::int64_t i = 0; i < k; ++i) {
    coeff = coeff * static_cast<unsigned __int128>(n - i) /
            static_cast<unsigned __int128>(i + 1);
    sum += coeff;
  }
  return std::ldexp(static_cast<double>(sum), static_cast<int>(-n));
}

double log_binom_pmf(std::int64_t i, std::int64_t n, double log_p,
                     double log_q) {
  const double nd = static_cast<double>(n);
  const double id = static_cast<double>(i);
  return log_gamma(nd + 1.0) - log_gamma(id + 1.0) -
         log_gamma(nd - id + 1.0) + id * log_p + (nd - id) * log_q;
}

// Sum of pmf(i) for i in [0, k], anchored at the largest term pmf(k).
// Requires k below the mode so the terms decrease moving away from k.
double lower_tail(std::int64_t k, std::int64_t n, double p) {
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double odds_inv = (1.0 - p) / p;
  double term = 1.0;
  double series = 1.0;
  for (std::int64_t i = k; i > 0; --i) {
    term *= static_cast<double>(i) / static_cast<double>(n - i + 1) * odds_inv;
    series += term;
    if (term < series * 1e-17) break;
  }
  return std::exp(log_binom_pmf(k, n, log_p, log_q) + std::log(series));
}

// Sum of pmf(i) for i in [k + 1, n]. Requires k at or above the mode.
double upper_tail(std::int64_t k, std::int64_t n, double p) {
  const std::int64_t start = k + 1;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double odds = p / (1.0 - p);
  double term = 1.0;
  double series = 1.0;
  for (std::int64_t i = start; i < n; ++i) {
    term *= static_cast<double>(n - i) / static_cast<double>(i + 1) * odds;
    series += term;
    if (term < series * 1e-17) break;
  }
  return std::exp(log_binom_pmf(start, n, log_p, log_q) + std::log(series));
}

// Continued fraction for I_x(a, b), modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 20000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::string_view to_string(ViabilityMethod method) {
  switch (method) {
    case ViabilityMethod::kBinomialCdf:
      return "bcdf";
    case ViabilityMethod::kClopperPearson:
      return "clopper_pearson";
    case ViabilityMethod::kWilsonCC:
      return "wilson_cc";
    case ViabilityMethod::kWilsonNoCC:
      return "wilson_nocc";
    case ViabilityMethod::kAgrestiCoull:
      return "agresti_coull";
  }
  return "unknown";
}

ViabilityMethod parse_viability_method(std::string_view name) {
  for (ViabilityMethod m : kAllViabilityMethods) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument(
      "unknown viability method '" + std::string(name) +
      "' (expected bcdf, clopper_pearson, wilson_cc, wilson_nocc or "
      "agresti_coull)");
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma requires x > 0");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double binom_cdf_summation(std::int64_t k, std::int64_t n, double p) {
  check_tally(k, n);
  check_probability(p);
  if (k == n || p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;

  if (p == 0.5) {
    if (n <= kExactIntegerLimit) return half_cdf_exact(k, n);
    if (2 * k + 1 == n) return 0.5;
    if (2 * k >= n) return 1.0 - binom_cdf_summation(n - k - 1, n, 0.5);
    return lower_tail(k, n, 0.5);
  }

  const auto mode = static_cast<std::int64_t>(
      std::floor(static_cast<double>(n + 1) * p));
  if (k < mode) return lower_tail(k, n, p);
  return clamp_unit(1.0 - upper_tail(k, n, p));
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) {
    throw std::domain_error("incomplete beta requires a > 0 and b > 0");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("incomplete beta requires x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return clamp_unit(front * beta_continued_fraction(a, b, x) / a);
  }
  return clamp_unit(1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b);
}

double inverse_regularized_incomplete_beta(double a, double b, double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::domain_error("inverse incomplete beta requires q in [0, 1]");
  }
  if (q == 0.0) return 0.0;
  if (q == 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 1100; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (regularized_incomplete_beta(a, b, mid) >= q) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double binom_cdf_incomplete_beta(std::int64_t k, std::int64_t n, double p) {
  check_tally(k, n);
  check_probability(p);
  if (k == n) return 1.0;
  return regularized_incomplete_beta(static_cast<double>(n - k),
                                     static_cast<double>(k + 1), 1.0 - p);
}

double binom_cdf(std::int64_t k, std::int64_t n, double p) {
  if (n <= kSummationLimit) return binom_cdf_summation(k, n, p);
  check_tally(k, n);
  // Exact median of a symmetric binomial.
  if (p == 0.5 && 2 * k + 1 == n) return 0.5;
  return binom_cdf_incomplete_beta(k, n, p);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("normal_quantile requires q in (0, 1)");
  }
  // Acklam's rational approximation followed by one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  double x;
  if (q < kLow) {
    const double t = std::sqrt(-2.0 * std::log(q));
    x = (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
        ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  } else if (q <= 1.0 - kLow) {
    const double s = q - 0.5;
    const double r = s * s;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        s /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double t = std::sqrt(-2.0 * std::log1p(-q));
    x = -(((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
        ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  }
  constexpr double kSqrt2Pi = 2.5066282746310002;
  const double e = normal_cdf(x) - q;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double ci_lower_bound(const RegionTally& tally, double delta,
                      ViabilityMethod method) {
  if (method == ViabilityMethod::kBinomialCdf) {
    throw std::domain_error("bcdf has no confidence-interval form");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("delta must lie in (0, 1)");
  }
  check_tally(tally.k, tally.n);
  if (tally.n < 1) throw std::domain_error("confidence bound requires n >= 1");
  if (tally.k == 0) return 0.0;

  const double n = static_cast<double>(tally.n);
  const double k = static_cast<double>(tally.k);
  const double phat = k / n;

  if (method == ViabilityMethod::kClopperPearson) {
    // delta-quantile of Beta(k, n - k + 1).
    return inverse_regularized_incomplete_beta(k, n - k + 1.0, delta);
  }

  const double z = normal_quantile(1.0 - delta);
  const double z2 = z * z;
  switch (method) {
    case ViabilityMethod::kWilsonNoCC: {
      const double centre = phat + z2 / (2.0 * n);
      const double spread =
          z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
      return clamp_unit((centre - spread) / (1.0 + z2 / n));
    }
    case ViabilityMethod::kWilsonCC: {
      const double radicand =
          z2 - 1.0 / n + 4.0 * n * phat * (1.0 - phat) + (4.0 * phat - 2.0);
      const double root = z * std::sqrt(std::max(0.0, radicand));
      return clamp_unit((2.0 * n * phat + z2 - (root + 1.0)) /
                        (2.0 * (n + z2)));
    }
    case ViabilityMethod::kAgrestiCoull: {
      const double n_tilde = n + z2;
      const double p_tilde = (k + z2 / 2.0) / n_tilde;
      return clamp_unit(p_tilde -
                        z * std::sqrt(p_tilde * (1.0 - p_tilde) / n_tilde));
    }
    default:
      break;
  }
  throw std::domain_error("unsupported viability method");
}

bool region_viable(const RegionTally& tally, double delta,
                   ViabilityMethod method) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("delta must lie in (0, 1)");
  }
  check_tally(tally.k, tally.n);
  if (tally.n == 0) return true;
  if (method == ViabilityMethod::kBinomialCdf) {
    return binom_cdf(tally.k, tally.n, 0.5) <= 1.0 - delta;
  }
  return ci_lower_bound(tally, delta, method) <= 0.5;
}

}  // namespace rejectkit
