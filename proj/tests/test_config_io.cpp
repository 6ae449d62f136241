#include "pivotk/config.hpp"
#include "pivotk/error.hpp"
#include "pivotk/io.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace pivotk;

TEST(Config, DefaultsRoundTrip) {
  const AnalysisConfig config;
  EXPECT_EQ(config_from_json(to_json(config)), config);
}

TEST(Config, ShippedDefaultsMatchBuiltIn) {
  EXPECT_EQ(load_config(std::string(PIVOTK_SOURCE_DIR) + "/configs/defaults.json"), AnalysisConfig{});
}

TEST(Config, ModifiedRoundTrip) {
  AnalysisConfig config;
  config.s = 3;
  config.threshold_kind = ThresholdKind::symbols;
  config.thresholds = {61, 90};
  config.econ.mode = EconConfig::Mode::bytes;
  config.econ.bytes = ByteModel{120, 8, 256, 1e-4, 0.6, 3};
  config.race.arrival = RaceConfig::Arrival::piecewise;
  config.race.knots = {{0.0, 0.0}, {1.0, 1.0}};
  config.epsilon = 0.01;
  config.trace_output = "traces.jsonl";
  EXPECT_EQ(config_from_json(to_json(config)), config);
}

TEST(Config, RejectsBadInput) {
  auto j = to_json(AnalysisConfig{});
  j["surprise"] = 1;
  EXPECT_THROW(config_from_json(j), ValidationError);

  j = to_json(AnalysisConfig{});
  j["beta"] = 0.205;
  EXPECT_THROW(config_from_json(j).validate(), ValidationError);

  j = to_json(AnalysisConfig{});
  j["econ"]["header_bytes"] = 10;
  EXPECT_THROW(config_from_json(j), ValidationError);

  j = to_json(AnalysisConfig{});
  j["instance"]["m"] = 200;
  EXPECT_THROW(config_from_json(j).validate(), ValidationError);

  EXPECT_THROW(load_config("/nonexistent/config.json"), ValidationError);
}

TEST(Config, ErrorsNameTheField) {
  auto j = to_json(AnalysisConfig{});
  j["mc"]["trials"] = "many";
  try {
    config_from_json(j);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("mc.trials"), std::string::npos) << e.what();
  }
}

TEST(Policy, ParseRoundTrip) {
  for (const std::string spec : {"full_include", "full_withhold", "w:0.25", "minimal_sabotage", "spread:1,0,2",
                                 "scripted:3,1"}) {
    const auto p = parse_policy(spec);
    EXPECT_EQ(policy_name(parse_policy(policy_name(p))), policy_name(p)) << spec;
  }
  EXPECT_THROW(parse_policy("w:1.5"), ValidationError);
  EXPECT_THROW(parse_policy("bribe"), ValidationError);
  EXPECT_EQ(parse_mechanism_mode("fees_only"), MechanismMode::fees_only);
}

TEST(Traces, JsonlRoundTripAndReplay) {
  const auto instance = SystemInstance::from_kappa(100, 20, 30);
  const auto econ = EconParams::normalized(1.0, 1.0, 100.0, 0.99, 500.0);
  std::vector<TraceRecord> records;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (const auto& p : {AdversaryPolicy{policy::FullWithhold{}}, AdversaryPolicy{policy::StationaryW{0.5}},
                          AdversaryPolicy{policy::MinimalSabotage{}}}) {
      auto trace = run_trace(instance, 0.2, p, seed);
      const auto payoff = payoff_of_trace(trace, econ, MechanismMode::pivot_k);
      records.push_back({std::move(trace), econ, MechanismMode::pivot_k, payoff});
    }
  }
  std::stringstream io;
  write_jsonl(io, records);
  const auto back = read_jsonl(io);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].trace.bundles, records[i].trace.bundles);
    EXPECT_EQ(back[i].payoff.total, records[i].payoff.total);
  }
  const auto ok = replay(back);
  EXPECT_TRUE(ok.passed());
  EXPECT_EQ(ok.records, records.size());

  auto tampered = back;
  tampered[4].payoff.total += 1.0;
  tampered[7].trace.bundles.front().lane ^= 1;
  const auto bad = replay(tampered);
  EXPECT_EQ(bad.payoff_mismatches, 1u);
  EXPECT_GE(bad.trace_mismatches, 1u);
}

TEST(Traces, RejectsInconsistentSummary) {
  const auto instance = SystemInstance::from_kappa(100, 20, 30);
  const auto econ = EconParams::normalized(1.0, 1.0, 100.0, 0.99);
  auto trace = run_trace(instance, 0.2, policy::FullInclude{}, 1);
  const auto payoff = payoff_of_trace(trace, econ, MechanismMode::pivot_k);
  auto j = to_json(TraceRecord{trace, econ, MechanismMode::pivot_k, payoff});
  j["delayed"] = !j["delayed"].get<bool>();
  EXPECT_THROW(trace_record_from_json(j), Error);
}
