#include "pivotk/config.hpp"
#include "pivotk/error.hpp"
#include "pivotk/format.hpp"
#include "pivotk/reports.hpp"
#include "pivotk/verify.hpp"

#include <gtest/gtest.h>

using namespace pivotk;

TEST(Format, Probabilities) {
  EXPECT_EQ(fmt::probability(7.996e-5), "8.0e-5");
  EXPECT_EQ(fmt::probability(1.866e-21), "1.9e-21");
  EXPECT_EQ(fmt::probability(0.13604), "0.136");
  EXPECT_EQ(fmt::probability(0.9934), "0.993");
  EXPECT_EQ(fmt::probability(0.99999999998), "~1");
  EXPECT_EQ(fmt::probability(0.0), "0");
}

TEST(Format, MoneyAndBounty) {
  EXPECT_EQ(fmt::bounty_units(0.03998), "0.04");
  EXPECT_EQ(fmt::bounty_units(496.7), "497");
  EXPECT_EQ(fmt::grouped(4301.495), "4,301");
  EXPECT_EQ(fmt::usd_cents(49.7), "$49.70");
  EXPECT_EQ(fmt::usd_cents(0.004), "~$0");
  EXPECT_EQ(fmt::usd_scaled(0.002), "$0.002");
  EXPECT_EQ(fmt::usd_scaled(3400.0), "$3,400");
  EXPECT_EQ(fmt::percent(0.0004), "0.04%");
}

TEST(Format, TextTable) {
  fmt::TextTable t{{"a", "long"}, {{"1", "2"}, {"333", "4"}}};
  EXPECT_EQ(t.render(), "  a  long\n---------\n  1     2\n333     4\n");
  EXPECT_EQ(t.render_csv(), "a,long\n1,2\n333,4\n");
}

TEST(Reports, JsonCarriesSeedAndConfig) {
  AnalysisConfig config;
  config.seed = 77;
  const auto r = table_main(config);
  EXPECT_EQ(r.json["seed"], 77);
  EXPECT_EQ(config_from_json(r.json["config"]), config);
  EXPECT_EQ(r.display.rows.size(), 5u);
  EXPECT_EQ(r.csv.rows.size(), 5u);
}

TEST(Reports, SweepCoversRange) {
  AnalysisConfig config;
  const auto r = sweep_report(config, SweepKind::sawtooth);
  EXPECT_EQ(r.csv.rows.size(), 120u);
  config.sweep_first = 30;
  config.sweep_last = 31;
  config.sweep_trials = 200;
  EXPECT_EQ(sweep_report(config, SweepKind::ratchet).csv.rows.size(), 2u);
  EXPECT_EQ(sweep_report(config, SweepKind::race).csv.rows.size(), 2u);
  EXPECT_THROW(parse_sweep_kind("zigzag"), ValidationError);
}

TEST(Reports, AdviceCoversKnifeEdge) {
  AnalysisConfig config;
  const auto knife = advise_report(config, 20);
  bool saw_threshold = false;
  for (const auto& row : knife.csv.rows) saw_threshold |= row.front() == "verdict" && row.back().find("knife") != std::string::npos;
  EXPECT_TRUE(saw_threshold);
  EXPECT_NO_THROW(advise_report(config));
}

TEST(Verify, FaultInjectionIsCaught) {
  EXPECT_TRUE(verify_minimax(1, false).passed());
  EXPECT_FALSE(verify_minimax(1, true).passed());
  EXPECT_TRUE(verify_conservation(5, 200).passed());
  EXPECT_TRUE(verify_incentives(5).passed());
}
