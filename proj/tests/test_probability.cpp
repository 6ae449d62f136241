#include "oracles.hpp"
#include "pivotk/error.hpp"
#include "pivotk/probability.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pivotk;

namespace {

void expect_rel(double got, double want, double rel) {
  EXPECT_NEAR(got, want, rel * std::abs(want)) << "got " << got << " want " << want;
}

}  // namespace

TEST(LogFactorial, MatchesLgamma) {
  for (std::uint64_t n : {0u, 1u, 2u, 10u, 170u, 1000u, 5000u, 100000u}) {
    expect_rel(log_factorial(n) + 1e-300, std::lgamma(static_cast<double>(n) + 1.0) + 1e-300, 1e-12);
  }
}

TEST(Hypergeom, PmfMatchesExactRatios) {
  HypergeomLaw law(100, 20, 20);
  for (std::int64_t k = 0; k <= 20; ++k) {
    const double want = oracle::to_double(oracle::hypergeom_pmf(100, 20, 20, static_cast<std::uint64_t>(k)));
    expect_rel(law.pmf(k), want, 1e-12);
  }
  EXPECT_EQ(law.pmf(-1), 0.0);
  EXPECT_EQ(law.pmf(21), 0.0);
}

TEST(Hypergeom, TailReferenceValues) {
  HypergeomLaw law(100, 20, 20);
  expect_rel(law.tail_ge(11).value, 7.996483334308655e-05, 1e-9);
  // The full-hand event is far below double's comfortable range relative to
  // 1 but still representable; its log stays exact.
  const auto full = law.tail_ge(20);
  expect_rel(full.value, 1.8664e-21, 1e-3);
  expect_rel(full.log_value, std::log(oracle::to_double(oracle::hypergeom_pmf(100, 20, 20, 20))), 1e-12);
  expect_rel(1.0 - law.pmf(0), 0.993404, 1e-5);
  EXPECT_EQ(law.tail_ge(0).value, 1.0);
  EXPECT_EQ(law.tail_ge(21).value, 0.0);
}

TEST(Hypergeom, SupportAndMean) {
  HypergeomLaw law(10, 8, 5);
  EXPECT_EQ(law.support_min(), 3);
  EXPECT_EQ(law.support_max(), 5);
  EXPECT_NEAR(law.mean(), 4.0, 1e-15);
  EXPECT_THROW(HypergeomLaw(10, 11, 5), ValidationError);
  EXPECT_THROW(HypergeomLaw(10, 5, 11), ValidationError);
}

TEST(Hypergeom, LogTailStaysFiniteOnUnderflow) {
  HypergeomLaw law(5000, 1000, 1000);
  const auto p = law.tail_ge(1000);
  EXPECT_EQ(p.value, 0.0);
  EXPECT_TRUE(std::isfinite(p.log_value));
  EXPECT_LT(p.log_value, -700.0);
}

TEST(Convolution, SumLawMatchesExact) {
  HypergeomLaw law(100, 20, 20);
  for (std::uint32_t t : {1u, 2u, 3u, 5u}) {
    const auto got = convolve_iid(law, t);
    const auto want = oracle::hypergeom_sum_law(100, 20, 20, t);
    ASSERT_EQ(got.max(), static_cast<std::int64_t>(want.size()) - 1);
    for (std::size_t k = 0; k < want.size(); ++k) {
      EXPECT_NEAR(got.pmf(static_cast<std::int64_t>(k)), oracle::to_double(want[k]), 1e-14);
    }
    EXPECT_NEAR(got.total_mass(), 1.0, 1e-12);
    EXPECT_NEAR(got.mean(), 4.0 * t, 1e-10);
  }
}

TEST(Convolution, TailAndCdfAreComplements) {
  const auto law = convolve_iid(HypergeomLaw(100, 20, 20), 2);
  for (std::int64_t x = -1; x <= 41; ++x) EXPECT_NEAR(law.tail_gt(x) + law.cdf(x), 1.0, 1e-12);
}

TEST(DiscreteDistribution, RejectsBadMass) {
  EXPECT_THROW(DiscreteDistribution(0, {0.5, 0.4}), ValidationError);
  EXPECT_THROW(DiscreteDistribution(0, {1.2, -0.2}), ValidationError);
  const auto point = DiscreteDistribution::point_mass(3);
  EXPECT_EQ(point.tail_ge(3), 1.0);
  EXPECT_EQ(point.tail_gt(3), 0.0);
}

TEST(Binomial, TailMatchesDirectSum) {
  const std::uint64_t n = 30;
  const double p = 0.3;
  for (std::int64_t r = 0; r <= 31; ++r) {
    double want = 0.0;
    for (std::int64_t k = std::max<std::int64_t>(r, 0); k <= 30; ++k) {
      want += oracle::to_double(oracle::choose(n, static_cast<std::uint64_t>(k))) * std::pow(p, k) *
              std::pow(1 - p, 30 - k);
    }
    EXPECT_NEAR(binomial_tail_ge(n, p, r).value, want, 1e-13);
  }
  EXPECT_EQ(binomial_tail_ge(5, 0.0, 1).value, 0.0);
  EXPECT_EQ(binomial_tail_ge(5, 1.0, 5).value, 1.0);
  EXPECT_NEAR(binomial_law(4, 0.5).pmf(2), 6.0 / 16.0, 1e-15);
}

TEST(Kl, KnownValues) {
  EXPECT_EQ(kl_divergence(0.2, 0.2), 0.0);
  EXPECT_NEAR(kl_divergence(0.0, 0.2), -std::log(0.8), 1e-15);
  EXPECT_NEAR(kl_divergence(1.0, 0.2), -std::log(0.2), 1e-15);
  EXPECT_NEAR(kl_divergence(0.5, 0.2), 0.5 * std::log(2.5) + 0.5 * std::log(0.625), 1e-15);
}

TEST(Chernoff, BoundsTheExactTail) {
  const std::uint32_t m = 20;
  for (std::uint32_t t : {1u, 2u, 4u}) {
    const auto law = convolve_iid(HypergeomLaw(100, 20, m), t);
    for (std::uint32_t k = 0; k <= t * m; ++k) {
      const double theta = static_cast<double>(k) / (t * m);
      if (theta >= 0.2) EXPECT_LE(law.tail_ge(k), chernoff_tail_bound(t, m, theta, 0.2, Tail::upper) * (1 + 1e-12));
      if (theta <= 0.2) EXPECT_LE(law.cdf(k), chernoff_tail_bound(t, m, theta, 0.2, Tail::lower) * (1 + 1e-12));
    }
  }
  EXPECT_THROW(chernoff_tail_bound(1, 20, 0.1, 0.2, Tail::upper), ValidationError);
}

TEST(CartelSize, RequiresIntegralProduct) {
  EXPECT_EQ(cartel_size(100, 0.2), 20u);
  EXPECT_EQ(cartel_size(10, 0.3), 3u);
  EXPECT_THROW(cartel_size(100, 0.205), ValidationError);
  EXPECT_THROW(cartel_size(100, 1.5), ValidationError);
}

TEST(CompensatedSum, RecoversSmallTerms) {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-17);
  s.add(-1.0);
  EXPECT_NEAR(s.value(), 1e-14, 1e-20);
}
