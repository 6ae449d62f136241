#pragma once

// Analysis configuration: one JSON document describing the instance grid,
// economics, Monte-Carlo settings, sweep range and race model.

#include "pivotk/geometry.hpp"
#include "pivotk/incentives.hpp"
#include "pivotk/intra_slot.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pivotk {

enum class ThresholdKind { kappa, symbols };

struct EconConfig {
  enum class Mode { normalized, bytes } mode = Mode::normalized;
  double proposer_fee = 1.0;          // normalized mode
  std::optional<double> bundle_fee;   // normalized mode, defaults to proposer_fee
  ByteModel bytes;                    // bytes mode (symbols_per_bundle comes from the instance)
  double alpha = 1.0;
  double value = 100.0;
  double gamma = 0.99;
  double bounty = 0.0;
  bool net_nonneg = true;

  EconParams build(std::uint32_t symbols_per_bundle) const;
  friend bool operator==(const EconConfig& a, const EconConfig& b);
};

struct MevTier {
  std::string name;
  double alpha_v_usd = 0.0;
  friend bool operator==(const MevTier&, const MevTier&) = default;
};

struct RaceConfig {
  double slot_duration = 1.0;
  double seal_deadline = 1.0;
  double reaction_time = 0.25;
  enum class Arrival { exponential, piecewise } arrival = Arrival::exponential;
  double rate = 4.0;
  bool renormalize = true;
  std::vector<std::pair<double, double>> knots;

  RaceModel build() const;
  friend bool operator==(const RaceConfig&, const RaceConfig&) = default;
};

struct AnalysisConfig {
  std::uint32_t n = 100;
  std::uint32_t m = 20;
  std::uint32_t s = 1;
  ThresholdKind threshold_kind = ThresholdKind::kappa;
  std::vector<std::uint32_t> thresholds{10, 20, 30, 50, 100};
  double beta = 0.2;
  EconConfig econ;
  double usd_per_unit = 0.10;
  std::vector<MevTier> mev_tiers{{"Routine swap", 5.0}, {"Sandwich / arb", 50.0}, {"Liquidation", 5000.0}};
  std::uint32_t operating_kappa = 30;
  std::uint32_t sweep_first = 1;
  std::uint32_t sweep_last = 120;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1729;
  std::uint64_t verify_paths = 2000;
  std::uint64_t sweep_trials = 10000;  // per kappa and spread in the ratchet sweep
  double epsilon = 0.0;
  RaceConfig race;
  std::optional<std::string> trace_output;

  /// One instance per configured threshold, in order.
  std::vector<SystemInstance> instances() const;
  /// Instance with decode threshold kappa bundles (K = kappa s).
  SystemInstance instance_for_kappa(std::uint32_t kappa) const;
  EconParams econ_params() const { return econ.build(s); }
  /// Throws ValidationError with a field path on any inconsistency.
  void validate() const;

  friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;
};

nlohmann::json to_json(const AnalysisConfig& config);
/// Missing fields keep their defaults; unknown fields are rejected.
AnalysisConfig config_from_json(const nlohmann::json& j);
AnalysisConfig load_config(const std::string& path);

}  // namespace pivotk
