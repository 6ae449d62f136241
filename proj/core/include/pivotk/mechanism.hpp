#pragma once

// PIVOT-K: deterministic resolution order over admissible bundles, the
// pivotal prefix, its per-bundle payments, and the rank-weight rule class.

#include "pivotk/rational.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace pivotk {

enum class Owner : std::uint8_t { honest, cartel };

std::string_view to_string(Owner owner);

/// Deterministic stand-in for the ticket hash H(ticket).
std::uint64_t ticket_hash(std::uint64_t ticket_id);

struct BundleRecord {
  std::uint32_t slot = 1;
  std::uint32_t lane = 1;
  std::uint64_t ticket_id = 0;
  std::uint64_t ticket_hash = 0;
  Owner owner = Owner::honest;
  bool admissible = true;

  friend bool operator==(const BundleRecord&, const BundleRecord&) = default;
};

BundleRecord make_record(std::uint32_t slot, std::uint32_t lane, std::uint64_t ticket_id, Owner owner,
                         bool admissible = true);

/// Drops non-admissible records and repeated ticket ids, then sorts by
/// (slot, lane, ticket_hash). Distinct tickets with equal hashes are
/// rejected with ValidationError.
std::vector<BundleRecord> resolve_order(std::span<const BundleRecord> records);

struct PivotalEntry {
  std::uint32_t rank = 0;  // 1-based
  std::uint32_t lane = 0;
  Owner owner = Owner::honest;
  std::uint32_t index_count = 0;
  Rational payment;
};

struct PivotalAllocation {
  std::vector<PivotalEntry> prefix;
  Rational total_paid;
  std::uint32_t kappa = 0;
  std::uint32_t final_bundle_indices = 0;

  std::uint32_t cartel_count() const;
  Rational cartel_payment() const;
};

/// Pays B/K per pivotal index across the first kappa = ceil(K/s) bundles of
/// an already resolved list. Throws DecodeNotReached when the list is short.
PivotalAllocation pivotal_allocation(std::span<const BundleRecord> ordered, std::uint32_t K, std::uint32_t s,
                                     const Rational& budget);

/// J_kappa: cartel bundles among the first kappa entries of a resolved list.
std::uint32_t cartel_prefix_count(std::span<const BundleRecord> ordered, std::uint32_t kappa);

/// Nonnegative rank weights summing to exactly one.
class WeightRule {
 public:
  static WeightRule uniform(std::uint32_t kappa);
  /// Throws ValidationError unless weights are nonnegative and sum to 1.
  static WeightRule from_weights(std::vector<Rational> weights);
  /// Weight of rank j proportional to delta^(slot_j - 1), normalized.
  static WeightRule time_decayed(std::span<const std::uint32_t> slot_of_rank, const Rational& delta);

  const std::vector<Rational>& weights() const { return weights_; }
  std::uint32_t kappa() const { return static_cast<std::uint32_t>(weights_.size()); }
  bool is_uniform() const;

 private:
  explicit WeightRule(std::vector<Rational> w) : weights_(std::move(w)) {}
  std::vector<Rational> weights_;
};

/// S_d: sum of the d smallest weights.
Rational removal_floor(const WeightRule& rule, std::uint32_t d);

struct MinimaxReport {
  std::uint32_t kappa = 0;
  std::uint32_t d = 0;
  std::size_t rules_checked = 0;
  std::size_t above_bound = 0;              // S_d > d/kappa
  std::size_t at_bound = 0;                 // S_d == d/kappa
  std::size_t non_uniform_at_bound = 0;     // equality without uniform weights
  std::size_t uniform_below_bound = 0;      // uniform rule failing to attain d/kappa
  bool passed() const { return above_bound == 0 && non_uniform_at_bound == 0 && uniform_below_bound == 0; }
};

/// Checks S_d(rule) <= d/kappa for every rule, equality only for uniform.
MinimaxReport minimax_certificate(std::uint32_t kappa, std::uint32_t d, std::span<const WeightRule> rules);

}  // namespace pivotk
