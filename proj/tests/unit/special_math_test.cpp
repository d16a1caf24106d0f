#include <gtest/gtest.h>

#include <cmath>

#include "harqmac/error.hpp"
#include "harqmac/random.hpp"
#include "harqmac/special_math.hpp"
#include "oracles.hpp"

using namespace harqmac;

TEST(ExpIntegral, QuadratureReferenceValues) {
  // Frozen from oracle::e1_quadrature.
  EXPECT_NEAR(exp_integral(1.0), 0.2193839344, 1e-9);
  EXPECT_NEAR(exp_integral(0.5), 0.5597735948, 1e-9);
  EXPECT_NEAR(oracle::e1_quadrature(1.0), 0.2193839344, 1e-9);
  EXPECT_NEAR(oracle::e1_quadrature(0.5), 0.5597735948, 1e-9);
}

TEST(ExpIntegral, MatchesQuadratureAcrossRange) {
  for (int i = 0; i < 50; ++i) {
    const double x = 1e-3 * std::pow(3e4, i / 49.0);
    const double ref = oracle::e1_quadrature(x);
    EXPECT_LE(std::abs(exp_integral(x) - ref) / ref, 1e-10) << "x = " << x;
  }
}

TEST(ExpIntegral, BranchSeamIsContinuous) {
  const double below = exp_integral(std::nextafter(1.0, 0.0));
  const double above = exp_integral(std::nextafter(1.0, 2.0));
  EXPECT_NEAR(below, above, 1e-14);
}

TEST(ExpIntegral, LargeArgumentBound) {
  const double v = exp_integral(50.0);
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, std::exp(-50.0) / 50.0);
  EXPECT_EQ(exp_integral(std::numeric_limits<double>::infinity()), 0.0);
}

TEST(ExpIntegral, SmallArgumentAsymptote) {
  const double x = 1e-12;
  EXPECT_NEAR(exp_integral(x), -kEulerGamma - std::log(x), 1e-11);
}

TEST(ExpIntegral, RejectsNonPositive) {
  EXPECT_THROW(exp_integral(0.0), DomainError);
  EXPECT_THROW(exp_integral(-1.0), DomainError);
  EXPECT_THROW(exp_integral(std::nan("")), DomainError);
}

TEST(MaxFading, Cdf) {
  EXPECT_DOUBLE_EQ(max_fading_cdf(1, 0.7), 1.0 - std::exp(-0.7));
  EXPECT_EQ(max_fading_cdf(2, 0.0), 0.0);
  EXPECT_NEAR(max_fading_cdf(3, 1.0), 0.252580, 1e-6);
  EXPECT_EQ(rayleigh_cdf(-1.0), 0.0);
}

TEST(MaxFading, CcdfIsAccurateInTheTail) {
  // 1 - (1 - e^{-x})^2 = 2e^{-x} - e^{-2x}
  const double x = 40.0;
  const double expected = 2.0 * std::exp(-x) - std::exp(-2.0 * x);
  EXPECT_NEAR(max_fading_ccdf(2, x) / expected, 1.0, 1e-12);
  EXPECT_NEAR(max_fading_ccdf(2, 1.3) + max_fading_cdf(2, 1.3), 1.0, 1e-15);
}

TEST(MaxFading, QuantileInvertsCdf) {
  for (int k = 1; k <= 4; ++k) {
    for (double u : {0.01, 0.3, 0.5, 0.9, 0.999}) {
      EXPECT_NEAR(max_fading_cdf(k, max_fading_quantile(k, u)), u, 1e-12);
    }
  }
  EXPECT_THROW(max_fading_quantile(2, 1.0), DomainError);
}

TEST(MaxFading, MonteCarloMaxOfThree) {
  Rng rng(11);
  const int n = 1'000'000;
  int below = 0;
  for (int i = 0; i < n; ++i) {
    const std::vector<double> g = sample_fading(FadingModel{}, 3, rng);
    below += *std::max_element(g.begin(), g.end()) <= 1.0;
  }
  const double p = max_fading_cdf(3, 1.0);
  EXPECT_NEAR(static_cast<double>(below) / n, p, 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST(Fading, EmpiricalMeanAndCdf) {
  Rng rng(5);
  const int n = 1'000'000;
  double sum = 0.0;
  int below = 0;
  for (int i = 0; i < n; ++i) {
    const double g = sample_fading(FadingModel{}, 1, rng)[0];
    sum += g;
    below += g <= 1.0;
  }
  EXPECT_NEAR(sum / n, 1.0, 0.004);
  EXPECT_NEAR(static_cast<double>(below) / n, 1.0 - std::exp(-1.0), 0.002);
}

TEST(Random, SameSeedSameSequence) {
  Rng a(42, 3), b(42, 3), c(42, 4);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    differs = differs || x != c.uniform();
  }
  EXPECT_TRUE(differs);
}

TEST(Random, UniformRange) {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Random, PortableFirstDraws) {
  // mt19937_64 output is fixed by the standard; these pin the seeding path.
  Rng rng(0, 0);
  const std::uint64_t first = rng();
  Rng again(0, 0);
  EXPECT_EQ(first, again());
  EXPECT_NE(mix_seed(0), mix_seed(1));
  EXPECT_NE(stream_id(0, 1), stream_id(1, 0));
}
