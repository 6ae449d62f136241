#include "pivotk/verify.hpp"

#include "pivotk/delay.hpp"
#include "pivotk/error.hpp"
#include "pivotk/format.hpp"
#include "pivotk/incentives.hpp"
#include "pivotk/mechanism.hpp"
#include "pivotk/ratchet.hpp"
#include "pivotk/rng.hpp"
#include "pivotk/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace pivotk {

using nlohmann::json;

namespace {

constexpr std::size_t kDetailCap = 20;

std::vector<std::uint32_t> sweep_kappas(const AnalysisConfig& c) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t k = c.sweep_first; k <= c.sweep_last; ++k) out.push_back(k);
  return out;
}

}  // namespace

void SuiteResult::check(bool ok, const std::string& what) {
  ++checks;
  if (ok) return;
  ++failures;
  if (details.size() < kDetailCap) details.push_back(what);
}

bool VerifyReport::passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
}

json VerifyReport::to_json() const {
  json suites_json = json::array();
  for (const auto& s : suites) {
    suites_json.push_back({{"name", s.name},
                           {"passed", s.passed()},
                           {"checks", s.checks},
                           {"failures", s.failures},
                           {"details", s.details}});
  }
  return {{"seed", seed}, {"passed", passed()}, {"suites", suites_json}};
}

SuiteResult verify_probability(const AnalysisConfig& c) {
  SuiteResult s("probability");
  for (const auto& inst : c.instances()) {
    const std::string tag = "kappa=" + std::to_string(inst.kappa());
    const auto law = horizon_cartel_contacts(inst, c.beta);
    s.check(std::abs(law.total_mass() - 1.0) < 1e-12, tag + ": S_{t*} law does not sum to 1");
    const double q0 = exact_q0(inst, c.beta);
    if (inst.knife_edge()) {
      const double closed = knife_edge_q0(inst, c.beta);
      s.check(std::abs(closed - q0) <= 1e-12 * std::max(1.0, q0), tag + ": knife-edge closed form disagrees");
    }
    if (c.beta < 1.0) {
      const auto t0 = distribution_of_T0(inst, c.beta, default_T0_cap(inst));
      s.check(std::abs(t0.law.tail_gt(inst.t_star()) - q0) <= 1e-12,
              tag + ": P[T(0) > t*] differs from q0 by " + fmt::shortest(std::abs(t0.law.tail_gt(inst.t_star()) - q0)));
      s.check(t0.law.min() >= static_cast<std::int64_t>(inst.t_star()), tag + ": T(0) has mass before t*");
    }
  }
  return s;
}

SuiteResult verify_delay_bounds(const AnalysisConfig& c) {
  SuiteResult s("delay_bounds");
  if (!(c.beta > 0.0)) return s;
  for (std::uint32_t kappa : sweep_kappas(c)) {
    const auto inst = c.instance_for_kappa(kappa);
    const std::string tag = "kappa=" + std::to_string(kappa);
    const double q0 = exact_q0(inst, c.beta);
    const double mass = static_cast<double>(inst.t_star()) * inst.m();
    const double theta = (inst.slack() + 1.0) / mass;
    if (theta > c.beta && theta <= 1.0) {
      const double bound = chernoff_tail_bound(inst.t_star(), inst.m(), theta, c.beta, Tail::upper);
      s.check(q0 <= bound * (1.0 + 1e-12), tag + ": q0 exceeds its Chernoff bound");
    }
    const double upper = no_delay_upper(inst, c.beta);
    s.check(1.0 - q0 <= upper * (1.0 + 1e-12) + 1e-15, tag + ": 1-q0 exceeds the no-delay bound");
    const auto rep = fluid_delay_report(inst, c.beta, Rational(0));
    if (rep.kl_bound) {
      const double bounded = rep.regime == DelayRegime::delay_rare ? rep.exact_probability : 1.0 - rep.exact_probability;
      s.check(bounded <= *rep.kl_bound * (1.0 + 1e-12) + 1e-15, tag + ": fluid KL bound violated");
    }
  }
  return s;
}

SuiteResult verify_ratchet(const AnalysisConfig& c) {
  SuiteResult s("ratchet");
  for (std::uint32_t kappa : sweep_kappas(c)) {
    const auto inst = c.instance_for_kappa(kappa);
    const auto schedule = ContactSchedule::uniform(c.m, kappa);
    const std::string tag = "kappa=" + std::to_string(kappa);
    const double q0 = exact_q0(inst, c.beta);
    const double q_rat = q_rat_first_slot(schedule, c.n, c.beta).value;
    s.check(q_rat <= q0 * (1.0 + 1e-12) + 1e-300, tag + ": q_rat exceeds q0");
    if (inst.t_star() == 1) {
      s.check(std::abs(q_rat - q0) <= 1e-12 * std::max(q0, 1e-300) + 1e-300, tag + ": q_rat != q0 at t* = 1");
    }
    const auto withheld = first_slot_withholding(schedule, c.n, c.beta);
    s.check(std::abs(honest_miss_delay_bound(schedule, 0.0, withheld) - q_rat) <= 1e-12,
            tag + ": honest-miss bound at epsilon=0 differs from q_rat");
    double last = -1.0;
    for (double eps : {0.0, 0.01, 0.05, 0.1, 0.3}) {
      const double b = honest_miss_delay_bound(schedule, eps, withheld);
      s.check(b >= last - 1e-15, tag + ": honest-miss bound decreased in epsilon");
      last = b;
    }
  }
  return s;
}

SuiteResult verify_conservation(std::uint64_t seed, std::size_t cases) {
  SuiteResult s("conservation");
  Engine eng = make_engine(seed, 0xc0);
  for (std::size_t i = 0; i < cases; ++i) {
    const auto K = static_cast<std::uint32_t>(1 + uniform_below(eng, 400));
    const auto sym = static_cast<std::uint32_t>(1 + uniform_below(eng, 16));
    const Rational budget = make_rational(static_cast<std::int64_t>(uniform_below(eng, 1'000'000)),
                                          static_cast<std::int64_t>(1 + uniform_below(eng, 997)));
    const std::uint32_t kappa = (K + sym - 1) / sym;
    std::vector<BundleRecord> order;
    for (std::uint32_t j = 0; j < kappa + 3; ++j) {
      order.push_back(make_record(1 + j / 50, 1 + j % 50, j, uniform_below(eng, 5) == 0 ? Owner::cartel : Owner::honest));
    }
    const auto alloc = pivotal_allocation(resolve_order(order), K, sym, budget);
    s.check(alloc.total_paid == budget, "K=" + std::to_string(K) + " s=" + std::to_string(sym) + " B=" +
                                            budget.str() + ": paid " + alloc.total_paid.str());
  }
  return s;
}

SuiteResult verify_minimax(std::uint64_t seed, bool inject_fault, std::uint32_t kappa, std::size_t rules) {
  SuiteResult s("minimax");
  Engine eng = make_engine(seed, 0x33);
  std::vector<WeightRule> family;
  family.reserve(rules);
  for (std::size_t i = 0; i < rules; ++i) {
    std::vector<BigInt> raw(kappa);
    BigInt total = 0;
    for (auto& r : raw) {
      r = BigInt(uniform_below(eng, 1000));
      total += r;
    }
    if (total == 0) {
      raw[0] = 1;
      total = 1;
    }
    std::vector<Rational> w;
    for (const auto& r : raw) w.emplace_back(r, total);
    family.push_back(WeightRule::from_weights(std::move(w)));
  }
  // The designated uniform rule must attain d/kappa.
  std::vector<Rational> reference(kappa, make_rational(1, kappa));
  if (inject_fault) {
    const Rational eps = make_rational(1, 1000 * std::int64_t{kappa});
    reference[0] -= eps;
    reference[1] += eps;
  }
  const WeightRule designated = WeightRule::from_weights(reference);
  family.push_back(designated);
  for (std::uint32_t d = 1; d <= 3 && d <= kappa; ++d) {
    const auto rep = minimax_certificate(kappa, d, family);
    const std::string tag = "d=" + std::to_string(d);
    s.check(rep.above_bound == 0, tag + ": " + std::to_string(rep.above_bound) + " rules exceed d/kappa");
    s.check(rep.non_uniform_at_bound == 0, tag + ": non-uniform rule attains d/kappa");
    s.check(rep.uniform_below_bound == 0, tag + ": uniform rule below d/kappa");
    s.check(removal_floor(designated, d) == make_rational(d, kappa), tag + ": designated uniform rule misses d/kappa");
  }
  return s;
}

SuiteResult verify_pathwise(const AnalysisConfig& c) {
  SuiteResult s("pathwise");
  const EconParams econ = c.econ_params();
  for (const auto& inst : c.instances()) {
    const auto rep = verify_pathwise_theorems(inst, c.beta, c.verify_paths, derive_seed(c.seed, inst.kappa()), econ);
    const std::string tag = "kappa=" + std::to_string(inst.kappa());
    s.check(rep.dominance_violations == 0, tag + ": " + std::to_string(rep.dominance_violations) + " dominance violations");
    s.check(rep.full_include_delays == 0, tag + ": full inclusion delayed");
    s.check(rep.prefix_violations == 0, tag + ": prefix monotonicity violated");
    s.check(rep.sabotage_violations == 0, tag + ": minimal sabotage not optimal");
    for (const auto& o : rep.offending) {
      if (s.details.size() < kDetailCap) s.details.push_back(o);
    }
  }
  return s;
}

SuiteResult verify_minimal_sabotage_family(std::uint64_t seed, std::uint64_t paths_per_instance) {
  SuiteResult s("minimal_sabotage");
  const std::uint32_t n = 10;
  const double beta = 0.3;
  const EconParams econ = EconParams::normalized(1.0, 1.0, 100.0, 0.99, 50.0);
  for (std::uint32_t m = 1; m <= 6; ++m) {
    for (std::uint32_t kappa = 1; kappa <= kExhaustiveContactLimit; ++kappa) {
      const auto inst = SystemInstance::from_kappa(n, m, kappa);
      if (inst.t_star() * m > kExhaustiveContactLimit) continue;
      const auto rep = verify_minimal_sabotage(inst, beta, econ, paths_per_instance, derive_seed(seed, m * 1000 + kappa));
      s.check(rep.sabotage_checked, "m=" + std::to_string(m) + " kappa=" + std::to_string(kappa) + ": " + rep.sabotage_note);
      s.check(rep.sabotage_violations == 0,
              "m=" + std::to_string(m) + " kappa=" + std::to_string(kappa) + ": over-withholding beat Delta+1");
      for (const auto& o : rep.offending) {
        if (s.details.size() < kDetailCap) s.details.push_back(o);
      }
    }
  }
  return s;
}

SuiteResult verify_mc_agreement(const AnalysisConfig& c, std::uint64_t trials) {
  SuiteResult s("mc_agreement");
  for (const auto& inst : c.instances()) {
    const double q0 = exact_q0(inst, c.beta);
    if (q0 < 1e-4) continue;  // not resolvable at this trial count
    const auto est = estimate_delay(inst, c.beta, policy::FullWithhold{}, trials, derive_seed(c.seed, 0x3c + inst.kappa()));
    const double se = std::sqrt(q0 * (1.0 - q0) / static_cast<double>(trials));
    const double gap = std::abs(est.frequency - q0);
    s.check(gap <= 3.0 * se + 0.5 / static_cast<double>(trials),
            "kappa=" + std::to_string(inst.kappa()) + ": MC " + fmt::shortest(est.frequency) + " vs exact " +
                fmt::shortest(q0) + " (se " + fmt::shortest(se) + ")");
  }
  return s;
}

SuiteResult verify_incentives(std::uint64_t seed) {
  SuiteResult s("incentives");
  const auto bayes = bayesian_optimal_bounty(BountyPrior::uniform(0.0, 1.0, 1.0, 0.0), 1e-3);
  s.check(std::abs(bayes.bounty - 0.5) <= 1e-3, "uniform prior optimum " + fmt::shortest(bayes.bounty));
  s.check(std::abs(bayes.expected_utility - 0.25) <= 1e-6, "uniform prior utility " + fmt::shortest(bayes.expected_utility));

  Engine eng = make_engine(seed, 0x4b);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t count = 1 + uniform_below(eng, 15);
    std::vector<AttackItem> items(count);
    for (auto& it : items) {
      it.gain = static_cast<double>(uniform_below(eng, 2001)) / 10.0 - 20.0;
      it.cost = static_cast<double>(uniform_below(eng, 501)) / 100.0;
    }
    const double capacity = static_cast<double>(uniform_below(eng, 2001)) / 100.0;
    const auto got = knapsack_select(items, capacity, 1e-2);
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << count); ++mask) {
      double g = 0.0;
      double w = 0.0;
      for (std::size_t i = 0; i < count; ++i) {
        if (mask >> i & 1u) {
          g += items[i].gain;
          w += items[i].cost;
        }
      }
      if (w <= capacity + 1e-9) best = std::max(best, g);
    }
    s.check(std::abs(got.total_gain - best) <= 1e-9, "knapsack trial " + std::to_string(trial) + ": " +
                                                          fmt::shortest(got.total_gain) + " vs " + fmt::shortest(best));
  }
  return s;
}

VerifyReport run_verify(const AnalysisConfig& c, const VerifyOptions& options) {
  VerifyReport report;
  report.seed = c.seed;
  report.suites.push_back(verify_probability(c));
  report.suites.push_back(verify_delay_bounds(c));
  report.suites.push_back(verify_ratchet(c));
  report.suites.push_back(verify_conservation(c.seed));
  report.suites.push_back(verify_minimax(c.seed, options.inject_minimax_fault));
  report.suites.push_back(verify_pathwise(c));
  report.suites.push_back(verify_minimal_sabotage_family(c.seed));
  report.suites.push_back(verify_mc_agreement(c, options.mc_trials ? options.mc_trials : 10 * c.verify_paths));
  report.suites.push_back(verify_incentives(c.seed));
  return report;
}

}  // namespace pivotk
