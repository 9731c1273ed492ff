#pragma once

// Randomness tests for candidate reject regions.
//
// A reject region with n examples of which k were classified correctly is
// "viable" when its accuracy is statistically consistent with at most random
// chance (p = 1/2). The exact test uses the Binomial CDF; four one-sided
// confidence-interval lower bounds are offered as cheaper substitutes.

#include <cstdint>
#include <string>
#include <string_view>

namespace rejectkit {

enum class ViabilityMethod {
  kBinomialCdf,
  kClopperPearson,
  kWilsonCC,
  kWilsonNoCC,
  kAgrestiCoull,
};

inline constexpr ViabilityMethod kAllViabilityMethods[] = {
    ViabilityMethod::kBinomialCdf, ViabilityMethod::kClopperPearson,
    ViabilityMethod::kWilsonCC, ViabilityMethod::kWilsonNoCC,
    ViabilityMethod::kAgrestiCoull};

// Wire names: "bcdf", "clopper_pearson", "wilson_cc", "wilson_nocc",
// "agresti_coull".
std::string_view to_string(ViabilityMethod method);
// Throws std::invalid_argument on an unknown name.
ViabilityMethod parse_viability_method(std::string_view name);

struct RegionTally {
  std::int64_t n = 0;  // region size
  std::int64_t k = 0;  // correct predictions inside the region

  friend bool operator==(const RegionTally&, const RegionTally&) = default;
};

// P(X <= k) for X ~ Binomial(n, p). Dispatches to the exact summation path
// for n <= 10^4 and to the incomplete beta path above that.
double binom_cdf(std::int64_t k, std::int64_t n, double p);

// Exact summation. Integer arithmetic for p = 1/2 and n <= 120, log-space
// term summation otherwise.
double binom_cdf_summation(std::int64_t k, std::int64_t n, double p);

// I_{1-p}(n - k, k + 1).
double binom_cdf_incomplete_beta(std::int64_t k, std::int64_t n, double p);

// Regularized incomplete beta I_x(a, b), continued fraction (modified Lentz).
double regularized_incomplete_beta(double a, double b, double x);

// Smallest x with I_x(a, b) >= q.
double inverse_regularized_incomplete_beta(double a, double b, double q);

// ln Gamma(x) for x > 0; reentrant.
double log_gamma(double x);

// Inverse standard normal CDF, |error| <= 1e-8 (in practice ~1e-15).
double normal_quantile(double q);

// Standard normal CDF.
double normal_cdf(double x);

// One-sided lower confidence bound at confidence 1 - delta on the success
// probability of `tally`. `method` must not be kBinomialCdf.
double ci_lower_bound(const RegionTally& tally, double delta,
                      ViabilityMethod method);

// Empty regions are viable. BCDF: binom_cdf(k; n, 1/2) <= 1 - delta.
// CI methods: lower bound <= 1/2.
bool region_viable(const RegionTally& tally, double delta,
                   ViabilityMethod method);

}  // namespace rejectkit
