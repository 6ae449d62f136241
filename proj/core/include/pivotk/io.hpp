#pragma once

// JSON forms of instances, economics, policies and traces, and the
// line-delimited trace format used by simulate/replay.

#include "pivotk/geometry.hpp"
#include "pivotk/incentives.hpp"
#include "pivotk/simulator.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace pivotk {

nlohmann::json to_json(const SystemInstance& instance);
SystemInstance instance_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EconParams& econ);
EconParams econ_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PayoffBreakdown& payoff);
PayoffBreakdown payoff_from_json(const nlohmann::json& j);

/// "full_include", "full_withhold", "w:0.5", "minimal_sabotage",
/// "spread:1,2,3", "scripted:2,0".
AdversaryPolicy parse_policy(const std::string& spec);

std::string_view to_string(MechanismMode mode);
MechanismMode parse_mechanism_mode(const std::string& text);

/// One trace with the economics and payoff it was scored under.
struct TraceRecord {
  Trace trace;
  EconParams econ;
  MechanismMode mode = MechanismMode::pivot_k;
  PayoffBreakdown payoff;
};

nlohmann::json to_json(const TraceRecord& record);
TraceRecord trace_record_from_json(const nlohmann::json& j);

void write_jsonl(std::ostream& out, const std::vector<TraceRecord>& records);
std::vector<TraceRecord> read_jsonl(std::istream& in);

struct ReplayResult {
  std::size_t records = 0;
  std::size_t payoff_mismatches = 0;
  std::size_t trace_mismatches = 0;  // re-simulation from the stored seed differs
  std::vector<std::string> messages;
  bool passed() const { return payoff_mismatches == 0 && trace_mismatches == 0; }
};

/// Recomputes each payoff from its stored trace (must match exactly) and
/// re-simulates the trace from its seed when the policy is reproducible.
ReplayResult replay(const std::vector<TraceRecord>& records);

}  // namespace pivotk
