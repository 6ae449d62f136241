#include "pivotk/simulator.hpp"

#include "pivotk/error.hpp"
#include "pivotk/format.hpp"
#include "pivotk/probability.hpp"
#include "pivotk/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>

namespace pivotk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::uint64_t kTransaction = 1;
constexpr std::uint64_t kField = 0xffff;

std::uint64_t ticket_id_for(std::uint32_t slot, std::uint32_t lane, std::uint32_t draw) {
  return (kTransaction << 48) | (std::uint64_t{slot} << 32) | (std::uint64_t{lane} << 16) | std::uint64_t{draw};
}

// Decides which cartel bundles of one slot are included. `cartel` holds
// positions into the slot's bundle list, already in resolution order.
class PolicyRunner {
 public:
  PolicyRunner(const AdversaryPolicy& policy, const SystemInstance& instance, std::uint64_t seed)
      : policy_(policy), instance_(instance), coin_(make_engine(seed, 1)) {}

  std::vector<bool> decide(std::uint32_t slot, std::size_t available) {
    std::vector<bool> include(available, true);
    const std::size_t t = slot - 1;
    std::visit(overloaded{
                   [&](const policy::FullInclude&) {},
                   [&](const policy::FullWithhold&) { std::fill(include.begin(), include.end(), false); },
                   [&](const policy::StationaryW& p) {
                     for (std::size_t j = 0; j < available; ++j) include[j] = uniform_unit(coin_) < p.w;
                   },
                   [&](const policy::MinimalSabotage&) {
                     if (slot > instance_.t_star()) return;
                     const std::size_t need = instance_.slack() + 1;
                     const std::size_t w = std::min(available, need - std::min(need, withheld_));
                     withhold_last(include, w);
                   },
                   [&](const policy::RatchetSpread& p) {
                     if (t >= p.caps.size()) return;
                     withhold_last(include, std::min<std::size_t>(available, p.caps[t]));
                   },
                   [&](const policy::Scripted& p) {
                     if (t >= p.counts.size()) return;
                     for (std::size_t j = p.counts[t]; j < available; ++j) include[j] = false;
                   },
                   [&](const policy::WithholdMask& p) {
                     if (t >= p.include.size()) return;
                     const auto& row = p.include[t];
                     for (std::size_t j = 0; j < available; ++j) include[j] = j < row.size() ? bool(row[j]) : true;
                   },
               },
               policy_);
    for (bool b : include) withheld_ += b ? 0 : 1;
    return include;
  }

 private:
  static void withhold_last(std::vector<bool>& include, std::size_t count) {
    for (std::size_t j = include.size() - count; j < include.size(); ++j) include[j] = false;
  }

  const AdversaryPolicy& policy_;
  const SystemInstance& instance_;
  Engine coin_;
  std::size_t withheld_ = 0;
};

void validate_policy(const AdversaryPolicy& policy) {
  if (const auto* p = std::get_if<policy::StationaryW>(&policy)) {
    if (!(p->w >= 0.0 && p->w <= 1.0)) throw ValidationError("stationary inclusion rate w must lie in [0,1]");
  }
}

std::string describe_path(const SystemInstance& instance, double beta, std::uint64_t seed, const std::string& policy,
                          const std::string& what) {
  nlohmann::json j = {{"n", instance.n()}, {"m", instance.m()},    {"s", instance.s()},
                      {"K", instance.K()}, {"beta", beta},         {"seed", seed},
                      {"policy", policy},  {"violation", what}};
  return j.dump();
}

}  // namespace

std::string policy_name(const AdversaryPolicy& policy) {
  return std::visit(overloaded{
                        [](const policy::FullInclude&) -> std::string { return "full_include"; },
                        [](const policy::FullWithhold&) -> std::string { return "full_withhold"; },
                        [](const policy::StationaryW& p) -> std::string {
                          return "stationary_w(" + fmt::shortest(p.w) + ")";
                        },
                        [](const policy::MinimalSabotage&) -> std::string { return "minimal_sabotage"; },
                        [](const policy::RatchetSpread& p) -> std::string {
                          std::string s = "ratchet_spread(";
                          for (std::size_t i = 0; i < p.caps.size(); ++i) s += (i ? "," : "") + std::to_string(p.caps[i]);
                          return s + ")";
                        },
                        [](const policy::Scripted& p) -> std::string {
                          std::string s = "scripted(";
                          for (std::size_t i = 0; i < p.counts.size(); ++i)
                            s += (i ? "," : "") + std::to_string(p.counts[i]);
                          return s + ")";
                        },
                        [](const policy::WithholdMask& p) -> std::string {
                          std::string s = "withhold_mask(";
                          for (std::size_t i = 0; i < p.include.size(); ++i) {
                            if (i) s += "|";
                            for (bool b : p.include[i]) s += b ? '1' : '0';
                          }
                          return s + ")";
                        },
                    },
                    policy);
}

Trace run_trace(const SystemInstance& instance, double beta, const AdversaryPolicy& policy, std::uint64_t seed) {
  validate_policy(policy);
  const std::uint32_t n = instance.n();
  const std::uint32_t m = instance.m();
  if (n > kField) throw ValidationError("simulator supports at most 65535 lanes");
  const std::uint32_t cap = kHorizonCapFactor * instance.t_star();
  if (cap > kField) throw ValidationError("simulator horizon exceeds 65535 slots; t* is too large");
  const auto cartel = static_cast<std::uint32_t>(cartel_size(n, beta));

  Engine contact = make_engine(seed, 0);
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 1u);
  // Cartel membership is a uniform subset so lane numbering carries no bias.
  for (std::uint32_t i = 0; i < cartel; ++i) std::swap(perm[i], perm[i + uniform_below(contact, n - i)]);
  std::vector<bool> is_cartel(n + 1, false);
  for (std::uint32_t i = 0; i < cartel; ++i) is_cartel[perm[i]] = true;

  PolicyRunner runner(policy, instance, seed);
  std::vector<BundleRecord> bundles;
  bundles.reserve(static_cast<std::size_t>(m) * (instance.t_star() + 2));
  std::uint64_t included = 0;
  bool decoded = false;
  for (std::uint32_t slot = 1; slot <= cap; ++slot) {
    for (std::uint32_t i = 0; i < m; ++i) std::swap(perm[i], perm[i + uniform_below(contact, n - i)]);
    std::vector<BundleRecord> slot_bundles;
    slot_bundles.reserve(m);
    for (std::uint32_t i = 0; i < m; ++i) {
      const std::uint32_t lane = perm[i];
      slot_bundles.push_back(
          make_record(slot, lane, ticket_id_for(slot, lane, i), is_cartel[lane] ? Owner::cartel : Owner::honest));
    }
    // Within a slot the resolution order is by lane.
    std::sort(slot_bundles.begin(), slot_bundles.end(),
              [](const BundleRecord& a, const BundleRecord& b) { return a.lane < b.lane; });
    std::vector<std::size_t> cartel_pos;
    for (std::size_t j = 0; j < slot_bundles.size(); ++j) {
      if (slot_bundles[j].owner == Owner::cartel) cartel_pos.push_back(j);
    }
    const auto include = runner.decide(slot, cartel_pos.size());
    for (std::size_t j = 0; j < cartel_pos.size(); ++j) slot_bundles[cartel_pos[j]].admissible = include[j];
    for (const auto& b : slot_bundles) included += b.admissible ? 1 : 0;
    bundles.insert(bundles.end(), slot_bundles.begin(), slot_bundles.end());
    if (slot >= instance.t_star() && included >= instance.kappa()) {
      decoded = true;
      break;
    }
  }
  return rebuild_trace(instance, beta, seed, policy_name(policy), std::move(bundles), !decoded);
}

Trace rebuild_trace(const SystemInstance& instance, double beta, std::uint64_t seed, std::string policy,
                    std::vector<BundleRecord> bundles, bool truncated) {
  Trace trace{instance, beta, seed, std::move(policy), {}, std::move(bundles), {}, 0, 0, 0, false, truncated};
  std::uint32_t last_slot = 0;
  for (const auto& b : trace.bundles) last_slot = std::max(last_slot, b.slot);
  trace.slots.assign(last_slot, SlotOutcome{});
  for (const auto& b : trace.bundles) {
    auto& s = trace.slots[b.slot - 1];
    if (b.owner == Owner::cartel) {
      ++s.cartel_contacts;
      if (b.admissible) ++s.cartel_included;
    } else {
      ++s.honest_contacts;
    }
  }
  std::uint64_t included = 0;
  for (std::uint32_t t = 0; t < last_slot; ++t) {
    const auto& s = trace.slots[t];
    included += s.honest_contacts + s.cartel_included;
    if (t + 1 <= instance.t_star()) trace.withheld_at_horizon += s.cartel_contacts - s.cartel_included;
    if (trace.inclusion_time == 0 && included >= instance.kappa()) trace.inclusion_time = t + 1;
  }
  if (truncated != (trace.inclusion_time == 0)) {
    throw PropertyViolation("trace truncation flag disagrees with its inclusion count");
  }
  trace.inclusion_order = resolve_order(trace.bundles);
  trace.delayed = truncated || trace.inclusion_time > instance.t_star();
  if (!truncated) trace.pivotal_cartel_count = cartel_prefix_count(trace.inclusion_order, instance.kappa());
  // Pathwise threshold: delay happens exactly when more than Delta bundles
  // are withheld by the horizon. Only meaningful when the horizon was seen.
  if (last_slot >= instance.t_star() && trace.delayed != (trace.withheld_at_horizon > instance.slack())) {
    throw PropertyViolation(describe_path(instance, beta, seed, trace.policy, "delayed != (W > Delta)"));
  }
  return trace;
}

PayoffBreakdown payoff_of_trace(const Trace& trace, const EconParams& econ, MechanismMode mode) {
  PayoffBreakdown out;
  const double g = econ.gamma();
  const std::size_t last = trace.truncated ? trace.slots.size() : trace.inclusion_time;
  CompensatedSum fees;
  for (std::size_t t = 0; t < last; ++t) {
    fees.add(std::pow(g, static_cast<double>(t)) * econ.proposer_fee() * trace.slots[t].cartel_included);
  }
  out.fee_revenue = fees.value();
  if (mode == MechanismMode::pivot_k && !trace.truncated && econ.bounty() > 0.0) {
    const auto alloc = pivotal_allocation(trace.inclusion_order, trace.instance.K(), trace.instance.s(),
                                          exact_rational(econ.bounty()));
    out.bounty_revenue = std::pow(g, static_cast<double>(trace.inclusion_time)) * to_double(alloc.cartel_payment());
  }
  if (trace.delayed) out.mev_option = econ.alpha_v() * std::pow(g, static_cast<double>(trace.instance.t_star()));
  out.total = out.fee_revenue + out.bounty_revenue + out.mev_option;
  return out;
}

McEstimate estimate_delay(const SystemInstance& instance, double beta, const AdversaryPolicy& policy,
                          std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) throw ValidationError("trials must be at least 1");
  validate_policy(policy);
  const auto counts = count_trials<1>(trials, [&](std::uint64_t i) {
    return std::array<bool, 1>{run_trace(instance, beta, policy, derive_seed(seed, i)).delayed};
  });
  return McEstimate::from_counts(counts[0], trials);
}

std::vector<AdversaryPolicy> dominance_battery(const SystemInstance& instance) {
  std::vector<std::uint32_t> even(instance.t_star(), 0);
  const std::uint32_t need = instance.slack() + 1;
  for (std::uint32_t i = 0; i < instance.t_star(); ++i) even[i] = need / instance.t_star() + (i < need % instance.t_star());
  return {policy::FullInclude{},
          policy::StationaryW{0.25},
          policy::StationaryW{0.5},
          policy::StationaryW{0.75},
          policy::MinimalSabotage{},
          policy::RatchetSpread{even},
          policy::Scripted{std::vector<std::uint32_t>(instance.t_star(), 1)}};
}

namespace {

// J_kappa when the withheld bundles selected by `extra` are also included.
// `sorted` lists every bundle of the trace in resolution order.
std::uint32_t prefix_with_insertions(const std::vector<BundleRecord>& sorted, const std::vector<std::size_t>& withheld,
                                     std::uint64_t extra, std::uint32_t kappa) {
  std::vector<bool> on(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) on[i] = sorted[i].admissible;
  for (std::size_t b = 0; b < withheld.size(); ++b) {
    if (extra >> b & 1u) on[withheld[b]] = true;
  }
  std::uint32_t seen = 0;
  std::uint32_t cartel = 0;
  for (std::size_t i = 0; i < sorted.size() && seen < kappa; ++i) {
    if (!on[i]) continue;
    ++seen;
    cartel += sorted[i].owner == Owner::cartel;
  }
  return cartel;
}

constexpr std::size_t kExhaustiveInsertionLimit = 12;
constexpr std::size_t kSpotInsertions = 8;

void check_prefix_monotonicity(const Trace& trace, std::uint64_t seed, PathwiseReport& report) {
  if (trace.truncated) return;
  std::vector<BundleRecord> sorted = trace.bundles;
  std::sort(sorted.begin(), sorted.end(), [](const BundleRecord& a, const BundleRecord& b) {
    return std::tie(a.slot, a.lane, a.ticket_hash) < std::tie(b.slot, b.lane, b.ticket_hash);
  });
  std::vector<std::size_t> withheld;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].owner == Owner::cartel && !sorted[i].admissible) withheld.push_back(i);
  }
  if (withheld.empty()) return;
  const std::uint32_t kappa = trace.instance.kappa();
  auto flag = [&](std::uint64_t base, std::uint64_t grown) {
    ++report.prefix_checks;
    if (prefix_with_insertions(sorted, withheld, grown, kappa) < prefix_with_insertions(sorted, withheld, base, kappa)) {
      ++report.prefix_violations;
      report.offending.push_back(describe_path(trace.instance, trace.beta, trace.seed, trace.policy,
                                               "inserting cartel bundles lowered J_kappa"));
    }
  };
  if (kappa <= kExhaustivePrefixKappa && withheld.size() <= kExhaustiveInsertionLimit) {
    const std::uint64_t subsets = std::uint64_t{1} << withheld.size();
    for (std::uint64_t s = 0; s < subsets; ++s) {
      for (std::size_t b = 0; b < withheld.size(); ++b) {
        if (!(s >> b & 1u)) flag(s, s | (std::uint64_t{1} << b));
      }
    }
    return;
  }
  // Random insertion chain for larger instances.
  Engine eng = make_engine(seed, 2);
  std::vector<std::size_t> order(withheld.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) std::swap(order[i], order[i + uniform_below(eng, order.size() - i)]);
  const std::size_t steps = std::min({order.size(), kSpotInsertions, std::size_t{63}});
  std::uint64_t mask = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    const std::uint64_t grown = mask | (std::uint64_t{1} << order[k]);
    flag(mask, grown);
    mask = grown;
  }
}

}  // namespace

PathwiseReport verify_pathwise_theorems(const SystemInstance& instance, double beta, std::uint64_t trials,
                                        std::uint64_t seed, const EconParams& econ) {
  PathwiseReport report;
  const auto battery = dominance_battery(instance);
  for (std::uint64_t i = 0; i < trials; ++i) {
    const std::uint64_t path = derive_seed(seed, i);
    const Trace worst = run_trace(instance, beta, policy::FullWithhold{}, path);
    ++report.paths;
    for (const auto& p : battery) {
      const Trace tr = run_trace(instance, beta, p, path);
      ++report.dominance_comparisons;
      if (tr.delayed && !worst.delayed) {
        ++report.dominance_violations;
        report.offending.push_back(describe_path(instance, beta, path, tr.policy, "delayed while full withholding is not"));
      }
      if (std::holds_alternative<policy::FullInclude>(p) && tr.delayed) {
        ++report.full_include_delays;
        report.offending.push_back(describe_path(instance, beta, path, tr.policy, "full inclusion delayed"));
      }
      if (std::holds_alternative<policy::StationaryW>(p) || std::holds_alternative<policy::MinimalSabotage>(p)) {
        check_prefix_monotonicity(tr, path, report);
      }
    }
  }
  const std::uint64_t sabotage_paths = std::min<std::uint64_t>(trials, 64);
  const auto sabotage = verify_minimal_sabotage(instance, beta, econ, sabotage_paths, derive_seed(seed, trials));
  report.sabotage_checked = sabotage.sabotage_checked;
  report.sabotage_note = sabotage.sabotage_note;
  report.sabotage_paths = sabotage.sabotage_paths;
  report.sabotage_patterns = sabotage.sabotage_patterns;
  report.sabotage_violations = sabotage.sabotage_violations;
  report.offending.insert(report.offending.end(), sabotage.offending.begin(), sabotage.offending.end());
  return report;
}

PathwiseReport verify_minimal_sabotage(const SystemInstance& instance, double beta, const EconParams& econ,
                                       std::uint64_t paths, std::uint64_t seed) {
  PathwiseReport report;
  const std::uint64_t horizon_contacts = std::uint64_t{instance.t_star()} * instance.m();
  if (horizon_contacts > kExhaustiveContactLimit) {
    report.sabotage_note = "skipped: t* m = " + std::to_string(horizon_contacts) + " exceeds the exhaustive limit " +
                           std::to_string(kExhaustiveContactLimit);
    return report;
  }
  if (!econ.net_nonneg_assumed() || !(econ.proposer_fee() > 0.0)) {
    report.sabotage_note = "skipped: requires f > 0 and the nonnegative-net-inclusion assumption";
    return report;
  }
  report.sabotage_checked = true;
  const std::uint32_t need = instance.slack() + 1;
  for (std::uint64_t p = 0; p < paths; ++p) {
    const std::uint64_t path = derive_seed(seed, p);
    const Trace base = run_trace(instance, beta, policy::FullInclude{}, path);
    ++report.sabotage_paths;
    std::vector<std::uint32_t> per_slot;
    std::uint32_t total = 0;
    for (std::uint32_t t = 0; t < instance.t_star(); ++t) {
      per_slot.push_back(base.slots[t].cartel_contacts);
      total += base.slots[t].cartel_contacts;
    }
    if (total < need) continue;  // no pattern on this path can delay
    std::optional<double> best_exact;
    std::optional<double> best_more;
    std::string best_more_policy;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << total); ++mask) {
      policy::WithholdMask pm;
      std::uint32_t bit = 0;
      for (std::uint32_t a : per_slot) {
        std::vector<bool> row(a);
        for (std::uint32_t j = 0; j < a; ++j, ++bit) row[j] = !(mask >> bit & 1u);
        pm.include.push_back(std::move(row));
      }
      const auto withheld = static_cast<std::uint32_t>(std::popcount(mask));
      if (withheld < need) continue;  // cannot delay (the trace asserts this)
      ++report.sabotage_patterns;
      const Trace tr = run_trace(instance, beta, pm, path);
      const double payoff = payoff_of_trace(tr, econ, MechanismMode::pivot_k).total;
      auto& slot = withheld == need ? best_exact : best_more;
      if (!slot || payoff > *slot) {
        slot = payoff;
        if (withheld != need) best_more_policy = tr.policy;
      }
    }
    if (best_exact && best_more && *best_more >= *best_exact) {
      ++report.sabotage_violations;
      report.offending.push_back(
          describe_path(instance, beta, path, best_more_policy, "over-withholding matched minimal sabotage"));
    }
  }
  return report;
}

}  // namespace pivotk
