#include "oracles.hpp"
#include "pivotk/error.hpp"
#include "pivotk/mechanism.hpp"
#include "pivotk/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace pivotk;

namespace {

std::vector<BundleRecord> honest_list(std::uint32_t count, std::uint32_t per_slot = 4) {
  std::vector<BundleRecord> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    out.push_back(make_record(1 + i / per_slot, 1 + i % per_slot, 1000 + i, i % 3 == 0 ? Owner::cartel : Owner::honest));
  }
  return out;
}

}  // namespace

TEST(ResolveOrder, SortsAndFilters) {
  std::vector<BundleRecord> records{
      make_record(2, 1, 7, Owner::honest),
      make_record(1, 5, 8, Owner::cartel),
      make_record(1, 2, 9, Owner::honest, false),  // withheld
      make_record(1, 2, 10, Owner::honest),
      make_record(1, 5, 8, Owner::cartel),  // replayed ticket
  };
  const auto ordered = resolve_order(records);
  ASSERT_EQ(ordered.size(), 3u);
  EXPECT_EQ(ordered[0].ticket_id, 10u);
  EXPECT_EQ(ordered[1].ticket_id, 8u);
  EXPECT_EQ(ordered[2].ticket_id, 7u);
}

TEST(ResolveOrder, SameLaneOrderedByHash) {
  std::vector<BundleRecord> records{make_record(1, 1, 1, Owner::honest), make_record(1, 1, 2, Owner::honest),
                                    make_record(1, 1, 3, Owner::honest)};
  const auto ordered = resolve_order(records);
  EXPECT_TRUE(std::is_sorted(ordered.begin(), ordered.end(),
                             [](const auto& a, const auto& b) { return a.ticket_hash < b.ticket_hash; }));
}

TEST(ResolveOrder, RejectsHashTies) {
  BundleRecord a = make_record(1, 1, 1, Owner::honest);
  BundleRecord b = make_record(1, 2, 2, Owner::honest);
  b.ticket_hash = a.ticket_hash;
  std::vector<BundleRecord> records{a, b};
  EXPECT_THROW(resolve_order(records), ValidationError);
}

TEST(Pivotal, NonDivisibleThreshold) {
  // K = 7 symbols at s = 3: kappa = 3, the last pivotal bundle carries one index.
  const auto ordered = resolve_order(honest_list(5));
  const auto alloc = pivotal_allocation(ordered, 7, 3, make_rational(70));
  ASSERT_EQ(alloc.prefix.size(), 3u);
  EXPECT_EQ(alloc.prefix[0].payment, make_rational(30));
  EXPECT_EQ(alloc.prefix[1].payment, make_rational(30));
  EXPECT_EQ(alloc.prefix[2].payment, make_rational(10));
  EXPECT_EQ(alloc.prefix[2].index_count, 1u);
  EXPECT_EQ(alloc.total_paid, make_rational(70));
}

TEST(Pivotal, ConservesBudgetExactly) {
  auto eng = make_engine(7, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = static_cast<std::uint32_t>(1 + uniform_below(eng, 5));
    const auto K = static_cast<std::uint32_t>(1 + uniform_below(eng, 60));
    const Rational budget = make_rational(static_cast<std::int64_t>(1 + uniform_below(eng, 100000)),
                                          static_cast<std::int64_t>(1 + uniform_below(eng, 997)));
    const std::uint32_t kappa = (K + s - 1) / s;
    const auto ordered = resolve_order(honest_list(kappa + 3));
    const auto alloc = pivotal_allocation(ordered, K, s, budget);
    Rational sum = 0;
    for (const auto& e : alloc.prefix) sum += e.payment;
    EXPECT_EQ(sum, budget);
    EXPECT_EQ(alloc.total_paid, budget);
    EXPECT_EQ(alloc.prefix.size(), kappa);
  }
}

TEST(Pivotal, ShortListThrows) {
  const auto ordered = resolve_order(honest_list(2));
  EXPECT_THROW(pivotal_allocation(ordered, 3, 1, make_rational(1)), DecodeNotReached);
}

TEST(Pivotal, CartelShare) {
  const auto ordered = resolve_order(honest_list(9));
  const auto alloc = pivotal_allocation(ordered, 6, 1, make_rational(6));
  EXPECT_EQ(alloc.cartel_count(), cartel_prefix_count(ordered, 6));
  EXPECT_EQ(alloc.cartel_payment(), make_rational(alloc.cartel_count()));
}

TEST(WeightRules, Validation) {
  EXPECT_THROW(WeightRule::from_weights({make_rational(1, 2), make_rational(1, 3)}), ValidationError);
  EXPECT_THROW(WeightRule::from_weights({make_rational(3, 2), make_rational(-1, 2)}), ValidationError);
  EXPECT_TRUE(WeightRule::uniform(5).is_uniform());
  EXPECT_TRUE(WeightRule::from_weights({make_rational(1, 2), make_rational(1, 2)}).is_uniform());
}

TEST(WeightRules, TimeDecayedNormalizes) {
  const std::vector<std::uint32_t> slots{1, 1, 2};
  const auto rule = WeightRule::time_decayed(slots, make_rational(1, 2));
  EXPECT_EQ(rule.weights()[0], make_rational(2, 5));
  EXPECT_EQ(rule.weights()[2], make_rational(1, 5));
  EXPECT_EQ(removal_floor(rule, 1), make_rational(1, 5));
}

TEST(Minimax, RandomRulesAgainstOracle) {
  auto eng = make_engine(11, 0);
  const std::uint32_t kappa = 12;
  std::vector<WeightRule> rules{WeightRule::uniform(kappa)};
  for (int i = 0; i < 200; ++i) {
    std::vector<BigInt> raw(kappa);
    BigInt total = 0;
    for (auto& r : raw) {
      r = BigInt(uniform_below(eng, 50));
      total += r;
    }
    if (total == 0) continue;
    std::vector<Rational> w;
    for (auto& r : raw) w.emplace_back(r, total);
    rules.push_back(WeightRule::from_weights(w));
  }
  for (std::uint32_t d : {1u, 2u, 3u}) {
    for (const auto& rule : rules) {
      EXPECT_EQ(removal_floor(rule, d), oracle::smallest_sum(rule.weights(), d));
      EXPECT_LE(removal_floor(rule, d), make_rational(d, kappa));
    }
    const auto report = minimax_certificate(kappa, d, rules);
    EXPECT_TRUE(report.passed());
    EXPECT_EQ(report.rules_checked, rules.size());
    EXPECT_GE(report.at_bound, 1u);
  }
}

TEST(Minimax, DetectsUniformFailingBound) {
  // A rule that is "uniform" in form but not in value cannot pass as uniform.
  std::vector<Rational> w(12, make_rational(1, 12));
  w[0] += make_rational(1, 12000);
  w[1] -= make_rational(1, 12000);
  const std::vector<WeightRule> rules{WeightRule::from_weights(w)};
  const auto report = minimax_certificate(12, 1, rules);
  EXPECT_EQ(report.above_bound, 0u);
  EXPECT_EQ(report.at_bound, 0u);
}
