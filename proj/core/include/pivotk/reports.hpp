#pragma once

// Report builders behind the CLI: the three reference tables, the kappa sweeps
// and the operating-point advice. Each report carries a display table, a
// CSV table of raw values and a JSON document.

#include "pivotk/config.hpp"
#include "pivotk/format.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

namespace pivotk {

enum class OutputFormat { table, csv, json };

OutputFormat parse_output_format(const std::string& text);

struct Report {
  fmt::TextTable display;
  fmt::TextTable csv;
  nlohmann::json json;

  std::string render(OutputFormat format) const;
};

/// kappa, t*, Delta, q0, q_rat, q_micro, B_static, B_static (USD)
Report table_main(const AnalysisConfig& config);
/// kappa, Delta, unilateral safe, equal share, B_coal, B_static
Report table_coalition(const AnalysisConfig& config);
/// Per MEV tier at the operating kappa: alpha v, B_static, B_ratchet, ratio.
Report table_cost(const AnalysisConfig& config);

enum class SweepKind { sawtooth, ratchet, race };
SweepKind parse_sweep_kind(const std::string& text);
Report sweep_report(const AnalysisConfig& config, SweepKind kind);

/// Recommendation for kappa (defaults to the configured operating point).
Report advise_report(const AnalysisConfig& config, std::optional<std::uint32_t> kappa = std::nullopt);

}  // namespace pivotk
