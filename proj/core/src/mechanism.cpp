#include "pivotk/mechanism.hpp"

#include "pivotk/error.hpp"
#include "pivotk/rng.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <tuple>
#include <unordered_set>

namespace pivotk {

std::string_view to_string(Owner owner) { return owner == Owner::cartel ? "cartel" : "honest"; }

std::uint64_t ticket_hash(std::uint64_t ticket_id) { return mix64(ticket_id ^ 0x5ed4a71c2b3f9e01ULL); }

BundleRecord make_record(std::uint32_t slot, std::uint32_t lane, std::uint64_t ticket_id, Owner owner,
                         bool admissible) {
  return BundleRecord{slot, lane, ticket_id, ticket_hash(ticket_id), owner, admissible};
}

std::vector<BundleRecord> resolve_order(std::span<const BundleRecord> records) {
  std::vector<BundleRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (r.admissible) out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [](const BundleRecord& a, const BundleRecord& b) {
    return std::tie(a.slot, a.lane, a.ticket_hash, a.ticket_id, a.owner) <
           std::tie(b.slot, b.lane, b.ticket_hash, b.ticket_id, b.owner);
  });
  std::unordered_set<std::uint64_t> seen;
  std::unordered_set<std::uint64_t> hashes;
  std::vector<BundleRecord> unique;
  unique.reserve(out.size());
  for (const auto& r : out) {
    if (!seen.insert(r.ticket_id).second) continue;
    if (!hashes.insert(r.ticket_hash).second) {
      throw ValidationError("two distinct tickets share hash " + std::to_string(r.ticket_hash) +
                            "; resolution order would be ambiguous");
    }
    unique.push_back(r);
  }
  return unique;
}

std::uint32_t PivotalAllocation::cartel_count() const {
  return static_cast<std::uint32_t>(
      std::count_if(prefix.begin(), prefix.end(), [](const PivotalEntry& e) { return e.owner == Owner::cartel; }));
}

Rational PivotalAllocation::cartel_payment() const {
  Rational sum = 0;
  for (const auto& e : prefix) {
    if (e.owner == Owner::cartel) sum += e.payment;
  }
  return sum;
}

PivotalAllocation pivotal_allocation(std::span<const BundleRecord> ordered, std::uint32_t K, std::uint32_t s,
                                     const Rational& budget) {
  if (K == 0 || s == 0) throw ValidationError("pivotal allocation needs K >= 1 and s >= 1");
  if (budget < 0) throw ValidationError("bounty budget must be nonnegative");
  const std::uint32_t kappa = (K + s - 1) / s;
  if (ordered.size() < kappa) {
    throw DecodeNotReached("only " + std::to_string(ordered.size()) + " admissible bundles; decoding needs " +
                           std::to_string(kappa));
  }
  PivotalAllocation alloc;
  alloc.kappa = kappa;
  alloc.final_bundle_indices = K - (kappa - 1) * s;
  const Rational per_index = budget / Rational(K);
  alloc.prefix.reserve(kappa);
  for (std::uint32_t i = 0; i < kappa; ++i) {
    const std::uint32_t indices = (i + 1 == kappa) ? alloc.final_bundle_indices : s;
    PivotalEntry e;
    e.rank = i + 1;
    e.lane = ordered[i].lane;
    e.owner = ordered[i].owner;
    e.index_count = indices;
    e.payment = per_index * indices;
    alloc.total_paid += e.payment;
    alloc.prefix.push_back(std::move(e));
  }
  return alloc;
}

std::uint32_t cartel_prefix_count(std::span<const BundleRecord> ordered, std::uint32_t kappa) {
  const auto end = ordered.begin() + std::min<std::size_t>(kappa, ordered.size());
  return static_cast<std::uint32_t>(
      std::count_if(ordered.begin(), end, [](const BundleRecord& r) { return r.owner == Owner::cartel; }));
}

// ---------------------------------------------------------------------------

WeightRule WeightRule::uniform(std::uint32_t kappa) {
  if (kappa == 0) throw ValidationError("weight rule needs kappa >= 1");
  return WeightRule(std::vector<Rational>(kappa, make_rational(1, kappa)));
}

WeightRule WeightRule::from_weights(std::vector<Rational> weights) {
  if (weights.empty()) throw ValidationError("weight rule needs at least one weight");
  Rational total = 0;
  for (const auto& w : weights) {
    if (w < 0) throw ValidationError("weights must be nonnegative");
    total += w;
  }
  if (total != 1) throw ValidationError("weights sum to " + total.str() + ", not 1");
  return WeightRule(std::move(weights));
}

WeightRule WeightRule::time_decayed(std::span<const std::uint32_t> slot_of_rank, const Rational& delta) {
  if (slot_of_rank.empty()) throw ValidationError("time-decayed rule needs at least one rank");
  if (delta <= 0 || delta > 1) throw ValidationError("decay factor must lie in (0,1]");
  std::vector<Rational> raw;
  raw.reserve(slot_of_rank.size());
  Rational total = 0;
  for (std::uint32_t slot : slot_of_rank) {
    if (slot == 0) throw ValidationError("slots are 1-based");
    Rational w = 1;
    for (std::uint32_t i = 1; i < slot; ++i) w *= delta;
    total += w;
    raw.push_back(std::move(w));
  }
  for (auto& w : raw) w /= total;
  return WeightRule(std::move(raw));
}

bool WeightRule::is_uniform() const {
  return std::all_of(weights_.begin(), weights_.end(), [&](const Rational& w) { return w == weights_.front(); });
}

Rational removal_floor(const WeightRule& rule, std::uint32_t d) {
  if (d < 1 || d > rule.kappa()) {
    throw ValidationError("removal count d = " + std::to_string(d) + " outside [1, " + std::to_string(rule.kappa()) +
                          "]");
  }
  std::vector<Rational> sorted = rule.weights();
  std::nth_element(sorted.begin(), sorted.begin() + (d - 1), sorted.end());
  std::sort(sorted.begin(), sorted.begin() + d);
  return std::accumulate(sorted.begin(), sorted.begin() + d, Rational(0));
}

MinimaxReport minimax_certificate(std::uint32_t kappa, std::uint32_t d, std::span<const WeightRule> rules) {
  MinimaxReport report;
  report.kappa = kappa;
  report.d = d;
  const Rational bound = make_rational(d, kappa);
  for (const auto& rule : rules) {
    if (rule.kappa() != kappa) throw ValidationError("weight rule length does not match kappa");
    const Rational floor = removal_floor(rule, d);
    ++report.rules_checked;
    const bool uniform = rule.is_uniform();
    if (floor > bound) {
      ++report.above_bound;
    } else if (floor == bound) {
      ++report.at_bound;
      // At d = kappa every rule removes the whole budget, so equality is
      // not exclusive to the uniform rule there.
      if (!uniform && d < kappa) ++report.non_uniform_at_bound;
    } else if (uniform) {
      ++report.uniform_below_bound;
    }
  }
  return report;
}

}  // namespace pivotk
