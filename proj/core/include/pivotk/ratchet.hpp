#pragma once

// Adaptive sender ("ratchet"): lanes that fail to redeem a ticket are
// excluded for the rest of the transaction.

#include "pivotk/geometry.hpp"
#include "pivotk/montecarlo.hpp"
#include "pivotk/probability.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pivotk {

struct RatchetState {
  std::uint64_t eligible_count = 0;   // n_t
  std::uint64_t flagged_count = 0;    // F_t, cartel lanes flagged so far
  std::uint64_t cartel_remaining = 0;
  double effective_beta = 0.0;        // cartel_remaining / eligible_count
};

/// P[A_1 > Delta_rec] with A_1 ~ Hypergeom(n, beta n, m_1).
Probability q_rat_first_slot(const ContactSchedule& schedule, std::uint64_t n, double beta);

/// (beta n - F) / (n - F). Throws ValidationError when F > beta n.
double beta_shrink(std::uint64_t n, double beta, std::uint64_t flagged);

/// Per-slot withholding caps (w_1, ..., w_{t*}); the cartel withholds
/// min(w_t, A_t) in slot t. Missing trailing entries mean 0.
struct SpreadPolicy {
  std::string name;
  std::vector<std::uint32_t> caps;
};

/// Nothing withheld, everything in slot 1, everything always, and Delta+1
/// spread as evenly as possible over slots 1..t*.
std::vector<SpreadPolicy> default_spread_family(const SystemInstance& instance);

struct RatchetMcReport {
  SpreadPolicy spread;
  McEstimate delay;        // sum W_t + E > Delta
  McEstimate bound_event;  // sum A_t^(rat) > Delta
  double static_q0 = 0.0;
  double epsilon = 0.0;
  std::uint64_t beta_increases = 0;  // trials where beta_t rose (only possible with epsilon > 0)
};

/// Monte-Carlo over the shrinking pool. Rejects t* = 1, where the ratchet
/// provides no within-transaction benefit.
RatchetMcReport ratchet_multi_slot_delay(const SystemInstance& instance, double beta, const SpreadPolicy& spread,
                                         std::uint64_t trials, std::uint64_t seed, double epsilon = 0.0);

/// P[W + Bin(M_{t*}, epsilon) > Delta_rec] by exact convolution.
double honest_miss_delay_bound(const ContactSchedule& schedule, double epsilon,
                               const DiscreteDistribution& withheld_law);

/// Withholding law W = A_1 for the one-shot first-slot deviation.
DiscreteDistribution first_slot_withholding(const ContactSchedule& schedule, std::uint64_t n, double beta);

struct RatchetSweepRow {
  std::uint32_t kappa = 0;
  double q0 = 0.0;
  double q_rat = 0.0;
  bool has_multi = false;  // false when t* = 1
  double q_rat_multi_mc = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double epsilon = 0.0;
  std::string worst_spread;
};

/// One row per kappa; the multi-slot column reports the worst member of the
/// default spread family.
std::vector<RatchetSweepRow> ratchet_sweep(std::uint32_t n, std::uint32_t m, double beta,
                                           const std::vector<std::uint32_t>& kappas, std::uint64_t trials,
                                           std::uint64_t seed, double epsilon = 0.0);

}  // namespace pivotk
