#pragma once

// Pathwise simulation of the lane-contact process under cartel policies,
// with payoff accounting and checks of the pathwise theorems.

#include "pivotk/geometry.hpp"
#include "pivotk/incentives.hpp"
#include "pivotk/mechanism.hpp"
#include "pivotk/montecarlo.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pivotk {

namespace policy {
struct FullInclude {};
struct FullWithhold {};
/// Each cartel bundle included independently with probability w.
struct StationaryW {
  double w = 1.0;
};
/// Withholds the first Delta+1 cartel bundles available through t*, then
/// includes everything.
struct MinimalSabotage {};
/// Withholds min(caps[t], A_t) in slot t; no withholding past the vector.
struct RatchetSpread {
  std::vector<std::uint32_t> caps;
};
/// Includes min(counts[t], A_t) cartel bundles in slot t; everything past
/// the vector is included.
struct Scripted {
  std::vector<std::uint32_t> counts;
};
/// include[t][j]: whether the j-th cartel bundle of slot t (in resolution
/// order) is included; slots past the vector include everything.
struct WithholdMask {
  std::vector<std::vector<bool>> include;
};
}  // namespace policy

using AdversaryPolicy = std::variant<policy::FullInclude, policy::FullWithhold, policy::StationaryW,
                                     policy::MinimalSabotage, policy::RatchetSpread, policy::Scripted,
                                     policy::WithholdMask>;

std::string policy_name(const AdversaryPolicy& policy);

struct SlotOutcome {
  std::uint32_t cartel_contacts = 0;   // A_t
  std::uint32_t honest_contacts = 0;   // H_t
  std::uint32_t cartel_included = 0;   // X_t
};

struct Trace {
  SystemInstance instance;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::string policy;
  std::vector<SlotOutcome> slots;
  /// Every contacted bundle; withheld ones are marked non-admissible.
  std::vector<BundleRecord> bundles;
  std::vector<BundleRecord> inclusion_order;
  /// First slot with at least kappa inclusions; 0 when truncated.
  std::uint32_t inclusion_time = 0;
  std::uint32_t withheld_at_horizon = 0;  // W_{t*}
  std::uint32_t pivotal_cartel_count = 0; // J_kappa
  bool delayed = false;
  bool truncated = false;
};

/// Traces stop at the inclusion time (never earlier than t*) or at this
/// multiple of t*, whichever comes first.
inline constexpr std::uint32_t kHorizonCapFactor = 64;

/// Contacts come from stream 0 of `seed` and do not depend on the policy,
/// so policies run with the same seed share a contact path.
Trace run_trace(const SystemInstance& instance, double beta, const AdversaryPolicy& policy, std::uint64_t seed);

/// Rebuilds the derived fields of a trace from its bundle list.
Trace rebuild_trace(const SystemInstance& instance, double beta, std::uint64_t seed, std::string policy,
                    std::vector<BundleRecord> bundles, bool truncated);

enum class MechanismMode { pivot_k, fees_only };

struct PayoffBreakdown {
  double fee_revenue = 0.0;
  double bounty_revenue = 0.0;
  double mev_option = 0.0;
  double total = 0.0;
};

PayoffBreakdown payoff_of_trace(const Trace& trace, const EconParams& econ, MechanismMode mode);

/// Per-trial seeds are derive_seed(seed, trial).
McEstimate estimate_delay(const SystemInstance& instance, double beta, const AdversaryPolicy& policy,
                          std::uint64_t trials, std::uint64_t seed);

/// Exhaustive pattern checks are limited to t* m at most this.
inline constexpr std::uint32_t kExhaustiveContactLimit = 18;
/// Prefix monotonicity is enumerated over all insertions for kappa up to this.
inline constexpr std::uint32_t kExhaustivePrefixKappa = 6;

struct PathwiseReport {
  std::uint64_t paths = 0;
  std::uint64_t dominance_comparisons = 0;
  std::uint64_t dominance_violations = 0;
  std::uint64_t full_include_delays = 0;
  std::uint64_t prefix_checks = 0;
  std::uint64_t prefix_violations = 0;
  bool sabotage_checked = false;
  std::string sabotage_note;
  std::uint64_t sabotage_paths = 0;
  std::uint64_t sabotage_patterns = 0;
  std::uint64_t sabotage_violations = 0;
  std::vector<std::string> offending;  // serialized (instance, beta, seed, policy)

  bool passed() const {
    return dominance_violations == 0 && full_include_delays == 0 && prefix_violations == 0 &&
           sabotage_violations == 0;
  }
};

std::vector<AdversaryPolicy> dominance_battery(const SystemInstance& instance);

/// (a) delayed(pi) <= delayed(FullWithhold) on common paths; (b) adding
/// cartel inclusions never lowers J_kappa; (c) on instances with
/// t* m <= kExhaustiveContactLimit, the best delay-achieving withholding
/// pattern withholds exactly Delta+1 (needs f > 0 and the static-fee flag).
PathwiseReport verify_pathwise_theorems(const SystemInstance& instance, double beta, std::uint64_t trials,
                                        std::uint64_t seed, const EconParams& econ);

/// Part (c) alone on a given number of random paths.
PathwiseReport verify_minimal_sabotage(const SystemInstance& instance, double beta, const EconParams& econ,
                                       std::uint64_t paths, std::uint64_t seed);

}  // namespace pivotk
