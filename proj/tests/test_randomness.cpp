#include "rejectkit/randomness.hpp"

#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <random>
#include <stdexcept>

namespace rejectkit {
namespace {

using boost::multiprecision::cpp_bin_float_100;
using boost::multiprecision::cpp_int;

// Sum_{i<=k} C(n,i) p^i (1-p)^(n-i) in 100-digit arithmetic.
double oracle_cdf(int k, int n, double p) {
  cpp_bin_float_100 bp(p);
  cpp_bin_float_100 bq = 1 - bp;
  cpp_bin_float_100 total = 0;
  cpp_int coeff = 1;
  for (int i = 0; i <= k; ++i) {
    if (i > 0) coeff = coeff * (n - i + 1) / i;
    total += cpp_bin_float_100(coeff) * pow(bp, i) * pow(bq, n - i);
  }
  return static_cast<double>(total);
}

double rel_err(double got, double want) {
  if (want == 0.0) return std::fabs(got);
  return std::fabs(got - want) / std::fabs(want);
}

// Bisection on the normal CDF, independent of the rational approximation.
double bisect_normal_quantile(double q) {
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(-mid / std::sqrt(2.0)) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(BinomCdf, FullSupportIsOne) {
  EXPECT_EQ(binom_cdf(7, 7, 0.3), 1.0);
  EXPECT_EQ(binom_cdf(0, 0, 0.5), 1.0);
}

TEST(BinomCdf, AnalyticValues) {
  EXPECT_EQ(binom_cdf(0, 10, 0.5), 0.0009765625);
  // 1 + 4 + 6 heads-or-fewer sequences out of 16.
  EXPECT_EQ(binom_cdf(2, 4, 0.5), 0.6875);
  EXPECT_EQ(binom_cdf(1, 3, 0.5), 0.5);
  EXPECT_NEAR(binom_cdf(50, 100, 0.5), 0.53979461869358938, 1e-15);
}

TEST(BinomCdf, RejectsBadArguments) {
  EXPECT_THROW(binom_cdf(5, 4, 0.5), std::domain_error);
  EXPECT_THROW(binom_cdf(-1, 4, 0.5), std::domain_error);
  EXPECT_THROW(binom_cdf(1, 4, 1.5), std::domain_error);
  EXPECT_THROW(binom_cdf(1, 4, std::nan("")), std::domain_error);
}

TEST(BinomCdf, DegenerateProbabilities) {
  EXPECT_EQ(binom_cdf(0, 5, 0.0), 1.0);
  EXPECT_EQ(binom_cdf(4, 5, 1.0), 0.0);
}

TEST(BinomCdf, MatchesArbitraryPrecisionForSeveralP) {
  for (double p : {0.5, 0.1, 0.3, 0.77, 0.95}) {
    for (int n : {1, 7, 33, 60, 200, 1000}) {
      const int step = std::max(1, n / 25);
      for (int k = 0; k <= n; k += step) {
        const double want = oracle_cdf(k, n, p);
        if (want < 1e-290) continue;
        EXPECT_LE(rel_err(binom_cdf(k, n, p), want), 1e-10)
            << "k=" << k << " n=" << n << " p=" << p;
      }
    }
  }
}

TEST(BinomCdf, ComplementIdentityAtHalf) {
  for (int n : {1, 2, 9, 64, 121, 500, 2001}) {
    for (int k = 0; k < n; k += std::max(1, n / 40)) {
      EXPECT_NEAR(binom_cdf(k, n, 0.5) + binom_cdf(n - k - 1, n, 0.5), 1.0, 1e-10)
          << "k=" << k << " n=" << n;
    }
  }
}

TEST(BinomCdf, MonotoneInK) {
  for (double p : {0.5, 0.2}) {
    for (int n : {30, 150, 3000}) {
      double prev = -1.0;
      for (int k = 0; k <= n; ++k) {
        const double v = binom_cdf(k, n, p);
        ASSERT_GE(v, prev) << "k=" << k << " n=" << n;
        prev = v;
      }
    }
  }
}

TEST(BinomCdf, SummationAndIncompleteBetaAgree) {
  std::mt19937_64 rng(11);
  for (int n : {10, 100, 1000}) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int trial = 0; trial < 30; ++trial) {
      const int k = pick(rng);
      const double a = binom_cdf_summation(k, n, 0.5);
      const double b = binom_cdf_incomplete_beta(k, n, 0.5);
      EXPECT_LE(std::fabs(a - b), 1e-9 * std::max(a, b)) << "k=" << k << " n=" << n;
    }
  }
}

TEST(BinomCdf, LargeNUsesIncompleteBeta) {
  EXPECT_EQ(binom_cdf(10000, 20001, 0.5), 0.5);
  EXPECT_NEAR(binom_cdf(10000, 20001, 0.5),
              binom_cdf_incomplete_beta(10000, 20001, 0.5), 1e-10);
}

TEST(IncompleteBeta, AgreesWithBoost) {
  for (double a : {0.5, 1.0, 3.0, 40.0, 700.0}) {
    for (double b : {0.5, 2.0, 25.0, 900.0}) {
      for (double x : {0.01, 0.2, 0.5, 0.73, 0.99}) {
        const double want = boost::math::ibeta(a, b, x);
        EXPECT_NEAR(regularized_incomplete_beta(a, b, x), want,
                    1e-12 + 1e-10 * want)
            << a << ' ' << b << ' ' << x;
      }
    }
  }
}

TEST(NormalQuantile, MatchesBisectionOracle) {
  EXPECT_EQ(normal_quantile(0.5), 0.0);
  EXPECT_NEAR(normal_quantile(0.95), 1.6448536269514722, 1e-12);
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
  for (double q : {1e-10, 0.001, 0.02, 0.3, 0.7, 0.9, 0.999, 1 - 1e-9}) {
    EXPECT_NEAR(normal_quantile(q), bisect_normal_quantile(q), 1e-8) << q;
  }
  EXPECT_THROW(normal_quantile(0.0), std::domain_error);
  EXPECT_THROW(normal_quantile(1.0), std::domain_error);
}

TEST(CiLowerBound, ClosedFormValues) {
  const RegionTally five_of_ten{10, 5};
  EXPECT_NEAR(ci_lower_bound(five_of_ten, 0.05, ViabilityMethod::kWilsonNoCC),
              0.2692718211382672, 1e-12);
  EXPECT_NEAR(ci_lower_bound(five_of_ten, 0.05, ViabilityMethod::kWilsonCC),
              0.23082869562441674, 1e-12);
  EXPECT_NEAR(ci_lower_bound(five_of_ten, 0.05, ViabilityMethod::kAgrestiCoull),
              0.26927182113826725, 1e-12);
  EXPECT_NEAR(ci_lower_bound(five_of_ten, 0.05, ViabilityMethod::kClopperPearson),
              0.2224411010081294, 1e-12);
}

TEST(CiLowerBound, ClopperPearsonEdges) {
  for (ViabilityMethod m : kAllViabilityMethods) {
    if (m == ViabilityMethod::kBinomialCdf) continue;
    EXPECT_EQ(ci_lower_bound({17, 0}, 0.05, m), 0.0) << to_string(m);
  }
  // Beta(n, 1) has CDF x^n, so its delta quantile is delta^(1/n).
  EXPECT_NEAR(ci_lower_bound({10, 10}, 0.05, ViabilityMethod::kClopperPearson),
              std::pow(0.05, 0.1), 1e-12);
}

TEST(CiLowerBound, ClopperPearsonMatchesBoostInverse) {
  for (int n : {3, 40, 900}) {
    for (int k = 1; k <= n; k += std::max(1, n / 7)) {
      for (double delta : {0.05, 0.5, 0.95}) {
        EXPECT_NEAR(ci_lower_bound({n, k}, delta, ViabilityMethod::kClopperPearson),
                    boost::math::ibeta_inv(double(k), double(n - k + 1), delta), 1e-12);
      }
    }
  }
}

TEST(CiLowerBound, BoundsStayInUnitInterval) {
  for (ViabilityMethod m : kAllViabilityMethods) {
    if (m == ViabilityMethod::kBinomialCdf) continue;
    for (int n : {1, 2, 5, 50}) {
      for (int k = 0; k <= n; ++k) {
        for (double delta : {0.01, 0.05, 0.5, 0.95, 0.99}) {
          const double lb = ci_lower_bound({n, k}, delta, m);
          EXPECT_GE(lb, 0.0);
          EXPECT_LE(lb, 1.0);
        }
      }
    }
  }
}

TEST(CiLowerBound, RejectsBinomialCdfAndBadInput) {
  EXPECT_THROW(ci_lower_bound({4, 2}, 0.05, ViabilityMethod::kBinomialCdf),
               std::domain_error);
  EXPECT_THROW(ci_lower_bound({0, 0}, 0.05, ViabilityMethod::kWilsonCC),
               std::domain_error);
  EXPECT_THROW(ci_lower_bound({4, 2}, 1.0, ViabilityMethod::kWilsonCC),
               std::domain_error);
}

TEST(RegionViable, Examples) {
  for (ViabilityMethod m : kAllViabilityMethods) {
    EXPECT_TRUE(region_viable({0, 0}, 0.05, m)) << to_string(m);
  }
  EXPECT_TRUE(region_viable({3, 1}, 0.05, ViabilityMethod::kBinomialCdf));
  EXPECT_FALSE(region_viable({20, 20}, 0.05, ViabilityMethod::kBinomialCdf));
  // CDF is exactly 1/2 here; the comparison is inclusive.
  EXPECT_TRUE(region_viable({3, 1}, 0.5, ViabilityMethod::kBinomialCdf));
  EXPECT_FALSE(region_viable({3, 2}, 0.5, ViabilityMethod::kBinomialCdf));
  EXPECT_THROW(region_viable({3, 1}, 0.0, ViabilityMethod::kBinomialCdf),
               std::domain_error);
}

TEST(RegionViable, ClopperPearsonIsTheOneOffsetBinomialTest) {
  // CP lower bound <= 1/2  <=>  P(X >= k) >= delta  <=>  cdf(k - 1) <= 1 - delta.
  for (int n = 1; n <= 80; ++n) {
    for (int k = 1; k <= n; ++k) {
      for (double delta : {0.05, 0.1, 0.75}) {
        EXPECT_EQ(region_viable({n, k}, delta, ViabilityMethod::kClopperPearson),
                  region_viable({n, k - 1}, delta, ViabilityMethod::kBinomialCdf))
            << n << ' ' << k << ' ' << delta;
      }
    }
  }
}

TEST(RegionViableProperty, MonotoneInDeltaAndK) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(1, 400);
  std::uniform_real_distribution<double> unit(0.001, 0.999);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = size(rng);
    const int k = std::uniform_int_distribution<int>(0, n)(rng);
    double d1 = unit(rng);
    double d2 = unit(rng);
    if (d2 > d1) std::swap(d1, d2);
    for (ViabilityMethod m : kAllViabilityMethods) {
      if (region_viable({n, k}, d1, m)) {
        EXPECT_TRUE(region_viable({n, k}, d2, m))
            << to_string(m) << " n=" << n << " k=" << k << " d1=" << d1 << " d2=" << d2;
      }
      if (k > 0 && region_viable({n, k}, d1, m)) {
        EXPECT_TRUE(region_viable({n, k - 1}, d1, m))
            << to_string(m) << " n=" << n << " k=" << k;
      }
    }
  }
}

TEST(ViabilityMethodNames, RoundTrip) {
  for (ViabilityMethod m : kAllViabilityMethods) {
    EXPECT_EQ(parse_viability_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_viability_method("bonferroni"), std::invalid_argument);
}

}  // namespace
}  // namespace rejectkit
