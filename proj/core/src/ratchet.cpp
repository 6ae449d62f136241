#include "pivotk/ratchet.hpp"

#include "pivotk/delay.hpp"
#include "pivotk/error.hpp"
#include "pivotk/rng.hpp"

#include <algorithm>
#include <array>
#include <random>

namespace pivotk {

Probability q_rat_first_slot(const ContactSchedule& schedule, std::uint64_t n, double beta) {
  const HypergeomLaw first(n, cartel_size(n, beta), schedule.first_slot_contacts());
  return first.tail_ge(static_cast<std::int64_t>(schedule.recovery_slack()) + 1);
}

double beta_shrink(std::uint64_t n, double beta, std::uint64_t flagged) {
  const auto cartel = cartel_size(n, beta);
  if (flagged > cartel) {
    throw ValidationError("cannot flag " + std::to_string(flagged) + " lanes: the cartel holds only " +
                          std::to_string(cartel));
  }
  if (flagged == n) return 0.0;  // only when beta = 1 and the whole pool is flagged
  return static_cast<double>(cartel - flagged) / static_cast<double>(n - flagged);
}

std::vector<SpreadPolicy> default_spread_family(const SystemInstance& instance) {
  const std::uint32_t t = instance.t_star();
  const std::uint32_t m = instance.m();
  std::vector<SpreadPolicy> family;
  family.push_back({"none", std::vector<std::uint32_t>(t, 0)});
  std::vector<std::uint32_t> first(t, 0);
  first[0] = m;
  family.push_back({"first_slot", first});
  family.push_back({"all_slots", std::vector<std::uint32_t>(t, m)});
  std::vector<std::uint32_t> even(t, 0);
  const std::uint32_t need = instance.slack() + 1;
  for (std::uint32_t i = 0; i < t; ++i) even[i] = need / t + (i < need % t ? 1 : 0);
  family.push_back({"even_delta_plus_one", even});
  return family;
}

namespace {

// Cartel count among `draws` lanes sampled without replacement.
std::uint64_t draw_cartel(Engine& eng, std::uint64_t pool, std::uint64_t cartel, std::uint64_t draws) {
  std::uint64_t hits = 0;
  for (std::uint64_t j = 0; j < draws; ++j) {
    if (uniform_below(eng, pool) < cartel) {
      ++hits;
      --cartel;
    }
    --pool;
  }
  return hits;
}

}  // namespace

RatchetMcReport ratchet_multi_slot_delay(const SystemInstance& instance, double beta, const SpreadPolicy& spread,
                                         std::uint64_t trials, std::uint64_t seed, double epsilon) {
  if (instance.t_star() < 2) {
    throw ValidationError("t* = 1: the ratchet provides no within-transaction benefit");
  }
  if (trials == 0) throw ValidationError("trials must be positive");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must lie in [0,1)");
  const std::uint64_t n = instance.n();
  const std::uint64_t cartel0 = cartel_size(n, beta);
  const std::uint32_t horizon = instance.t_star();
  const std::uint64_t slack = instance.slack();

  auto trial = [&](std::uint64_t index) {
    Engine eng = make_engine(seed, index);
    std::uint64_t pool = n;
    std::uint64_t cartel = cartel0;
    std::uint64_t withheld = 0;
    std::uint64_t misses = 0;
    std::uint64_t cartel_contacts = 0;
    std::uint64_t shortfall = 0;
    bool beta_rose = false;
    double last_beta = static_cast<double>(cartel) / static_cast<double>(pool);
    for (std::uint32_t t = 0; t < horizon; ++t) {
      const std::uint64_t contacts = std::min<std::uint64_t>(instance.m(), pool);
      shortfall += instance.m() - contacts;
      const std::uint64_t a = draw_cartel(eng, pool, cartel, contacts);
      cartel_contacts += a;
      const std::uint64_t cap = t < spread.caps.size() ? spread.caps[t] : 0;
      const std::uint64_t w = std::min(cap, a);
      std::uint64_t e = 0;
      if (epsilon > 0.0) {
        std::binomial_distribution<std::uint64_t> miss(contacts - a, epsilon);
        e = miss(eng);
      }
      withheld += w;
      misses += e;
      cartel -= w;
      pool -= w + e;
      if (pool == 0) break;
      const double now = static_cast<double>(cartel) / static_cast<double>(pool);
      if (now > last_beta) beta_rose = true;
      last_beta = now;
    }
    return std::array<bool, 3>{withheld + misses + shortfall > slack, cartel_contacts > slack, beta_rose};
  };
  const auto counts = count_trials<3>(trials, trial);

  RatchetMcReport report;
  report.spread = spread;
  report.delay = McEstimate::from_counts(counts[0], trials);
  report.bound_event = McEstimate::from_counts(counts[1], trials);
  report.static_q0 = exact_q0(instance, beta);
  report.epsilon = epsilon;
  report.beta_increases = counts[2];
  return report;
}

double honest_miss_delay_bound(const ContactSchedule& schedule, double epsilon,
                               const DiscreteDistribution& withheld_law) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must lie in [0,1)");
  if (epsilon == 0.0) return withheld_law.tail_gt(schedule.recovery_slack());
  const auto misses = binomial_law(schedule.planned_contacts(), epsilon);
  return withheld_law.convolve(misses).tail_gt(schedule.recovery_slack());
}

DiscreteDistribution first_slot_withholding(const ContactSchedule& schedule, std::uint64_t n, double beta) {
  return DiscreteDistribution::from(HypergeomLaw(n, cartel_size(n, beta), schedule.first_slot_contacts()));
}

std::vector<RatchetSweepRow> ratchet_sweep(std::uint32_t n, std::uint32_t m, double beta,
                                           const std::vector<std::uint32_t>& kappas, std::uint64_t trials,
                                           std::uint64_t seed, double epsilon) {
  std::vector<RatchetSweepRow> rows;
  rows.reserve(kappas.size());
  for (std::uint32_t kappa : kappas) {
    const auto instance = SystemInstance::from_kappa(n, m, kappa);
    const auto schedule = ContactSchedule::uniform(m, kappa);
    RatchetSweepRow row;
    row.kappa = kappa;
    row.q0 = exact_q0(instance, beta);
    row.epsilon = epsilon;
    row.q_rat = honest_miss_delay_bound(schedule, epsilon, first_slot_withholding(schedule, n, beta));
    if (instance.t_star() >= 2) {
      row.has_multi = true;
      bool first = true;
      for (const auto& spread : default_spread_family(instance)) {
        const auto mc = ratchet_multi_slot_delay(instance, beta, spread, trials, derive_seed(seed, kappa), epsilon);
        if (first || mc.delay.frequency > row.q_rat_multi_mc) {
          row.q_rat_multi_mc = mc.delay.frequency;
          row.ci_low = mc.delay.ci_low;
          row.ci_high = mc.delay.ci_high;
          row.worst_spread = spread.name;
          first = false;
        }
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pivotk
