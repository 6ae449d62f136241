#pragma once

// Property battery behind `pivotk verify`.

#include "pivotk/config.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace pivotk {

struct SuiteResult {
  SuiteResult() = default;
  explicit SuiteResult(std::string suite) : name(std::move(suite)) {}

  std::string name;
  std::uint64_t checks = 0;
  std::uint64_t failures = 0;
  std::vector<std::string> details;  // failing cases first, capped

  bool passed() const { return failures == 0; }
  void check(bool ok, const std::string& what);
};

struct VerifyOptions {
  /// Replace the uniform rule in the minimax suite with a perturbed one; the
  /// suite must then fail.
  bool inject_minimax_fault = false;
  /// Monte-Carlo trials per row for the MC/exact agreement suite; 0 uses
  /// ten times the configured verify paths.
  std::uint64_t mc_trials = 0;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<SuiteResult> suites;

  bool passed() const;
  nlohmann::json to_json() const;
};

VerifyReport run_verify(const AnalysisConfig& config, const VerifyOptions& options = {});

// Individual suites, exposed for tests.
SuiteResult verify_probability(const AnalysisConfig& config);
SuiteResult verify_delay_bounds(const AnalysisConfig& config);
SuiteResult verify_ratchet(const AnalysisConfig& config);
SuiteResult verify_conservation(std::uint64_t seed, std::size_t cases = 1000);
SuiteResult verify_minimax(std::uint64_t seed, bool inject_fault = false, std::uint32_t kappa = 12,
                           std::size_t rules = 1000);
SuiteResult verify_pathwise(const AnalysisConfig& config);
SuiteResult verify_minimal_sabotage_family(std::uint64_t seed, std::uint64_t paths_per_instance = 8);
SuiteResult verify_mc_agreement(const AnalysisConfig& config, std::uint64_t trials);
SuiteResult verify_incentives(std::uint64_t seed);

}  // namespace pivotk
