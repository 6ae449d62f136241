#include "oracles.hpp"
#include "pivotk/delay.hpp"
#include "pivotk/error.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pivotk;

TEST(ExactQ0, MatchesExactRationalLaw) {
  for (std::uint32_t kappa : {10u, 20u, 30u, 50u, 100u, 37u, 61u}) {
    const auto inst = SystemInstance::from_kappa(100, 20, kappa);
    const auto law = oracle::hypergeom_sum_law(100, 20, 20, inst.t_star());
    const double want = oracle::to_double(oracle::tail_gt(law, inst.slack()));
    EXPECT_NEAR(exact_q0(inst, 0.2), want, 1e-13) << kappa;
  }
}

TEST(ExactQ0, MatchesSubsetEnumeration) {
  // n = 8 lanes, 2 cartel lanes, 3 contacts per slot.
  for (std::uint32_t kappa = 1; kappa <= 9; ++kappa) {
    const auto inst = SystemInstance::from_kappa(8, 3, kappa);
    const auto want = oracle::enumerated_delay(8, 2, 3, inst.t_star(), inst.slack());
    EXPECT_NEAR(exact_q0(inst, 0.25), oracle::to_double(want), 1e-14) << kappa;
  }
}

TEST(ExactQ0, ReferenceValues) {
  EXPECT_NEAR(exact_q0(SystemInstance::from_kappa(100, 20, 30), 0.2), 0.13604, 5e-5);
  EXPECT_NEAR(exact_q0(SystemInstance::from_kappa(100, 20, 50), 0.2), 0.69946, 5e-5);
  EXPECT_NEAR(exact_q0(SystemInstance::from_kappa(100, 20, 100), 0.2), 0.99999999998751, 1e-13);
}

TEST(KnifeEdge, ClosedFormAgrees) {
  for (std::uint32_t kappa : {20u, 40u, 60u, 100u}) {
    const auto inst = SystemInstance::from_kappa(100, 20, kappa);
    EXPECT_NEAR(knife_edge_q0(inst, 0.2), exact_q0(inst, 0.2), 1e-13);
  }
  EXPECT_THROW(knife_edge_q0(SystemInstance::from_kappa(100, 20, 30), 0.2), ValidationError);
}

TEST(Fluid, RegimesAndBounds) {
  const auto inst = SystemInstance::from_kappa(100, 20, 30);
  // w = 0 is full withholding.
  const auto full = fluid_delay_report(inst, 0.2, 0.0);
  EXPECT_NEAR(full.exact_probability, exact_q0(inst, 0.2), 1e-13);
  EXPECT_EQ(full.contact_threshold, 11);
  // theta_0 = 11/40 > beta: delay is rare and the KL bound applies.
  EXPECT_EQ(full.regime, DelayRegime::delay_rare);
  ASSERT_TRUE(full.kl_bound.has_value());
  EXPECT_LE(full.exact_probability, *full.kl_bound);

  const auto likely = fluid_delay_report(SystemInstance::from_kappa(100, 20, 50), 0.2, 0.0);
  EXPECT_EQ(likely.regime, DelayRegime::delay_likely);
  ASSERT_TRUE(likely.kl_bound.has_value());
  EXPECT_LE(1.0 - likely.exact_probability, *likely.kl_bound);

  // A cartel that includes nearly everything cannot delay at all.
  const auto none = fluid_delay_report(inst, 0.2, make_rational(99, 100));
  EXPECT_EQ(none.regime, DelayRegime::impossible);
  EXPECT_EQ(none.exact_probability, 0.0);
  EXPECT_THROW(fluid_delay_report(inst, 0.2, 1.0), ValidationError);
}

TEST(Fluid, DegenerateThetaEqualsBetaIsReachable) {
  // kappa = 36: t* = 2, Delta = 4, so theta_w = 4 / ((1-w) 40) equals beta
  // exactly at w = 1/2.
  const auto inst = SystemInstance::from_kappa(100, 20, 36);
  const auto report = fluid_delay_report(inst, 0.2, make_rational(1, 2));
  EXPECT_EQ(report.regime, DelayRegime::degenerate);
  EXPECT_FALSE(report.kl_bound.has_value());
}

TEST(NoDelayUpper, DominatesOneMinusQ0) {
  for (std::uint32_t kappa = 1; kappa <= 120; ++kappa) {
    const auto inst = SystemInstance::from_kappa(100, 20, kappa);
    EXPECT_LE(1.0 - exact_q0(inst, 0.2), no_delay_upper(inst, 0.2) * (1 + 1e-12) + 1e-15) << kappa;
  }
  EXPECT_EQ(no_delay_upper(SystemInstance::from_kappa(100, 20, 10), 0.2), 1.0);
}
