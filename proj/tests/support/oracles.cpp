#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace oracle {

BigInt choose(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt out = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    out *= n - k + i;
    out /= i;
  }
  return out;
}

Rational hypergeom_pmf(std::uint64_t population, std::uint64_t successes, std::uint64_t draws, std::uint64_t k) {
  if (k > successes || k > draws || draws - k > population - successes) return 0;
  return Rational(choose(successes, k) * choose(population - successes, draws - k), choose(population, draws));
}

std::vector<Rational> hypergeom_sum_law(std::uint64_t population, std::uint64_t successes, std::uint64_t draws,
                                        std::uint32_t t) {
  std::vector<Rational> one(draws + 1);
  for (std::uint64_t k = 0; k <= draws; ++k) one[k] = hypergeom_pmf(population, successes, draws, k);
  std::vector<Rational> law{1};
  for (std::uint32_t i = 0; i < t; ++i) {
    std::vector<Rational> next(law.size() + draws);
    for (std::size_t a = 0; a < law.size(); ++a) {
      if (law[a] == 0) continue;
      for (std::size_t b = 0; b < one.size(); ++b) next[a + b] += law[a] * one[b];
    }
    law = std::move(next);
  }
  return law;
}

Rational tail_gt(const std::vector<Rational>& law, std::int64_t x) {
  Rational out = 0;
  for (std::size_t k = 0; k < law.size(); ++k) {
    if (static_cast<std::int64_t>(k) > x) out += law[k];
  }
  return out;
}

Rational enumerated_delay(std::uint32_t n, std::uint32_t cartel, std::uint32_t m, std::uint32_t t, std::int64_t x) {
  if (n > 16) throw std::invalid_argument("enumerated_delay: n too large");
  // Cartel counts of every m-subset of lanes.
  std::vector<std::uint32_t> counts;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::uint32_t>(__builtin_popcount(mask)) != m) continue;
    counts.push_back(static_cast<std::uint32_t>(__builtin_popcount(mask & ((1u << cartel) - 1))));
  }
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  std::function<void(std::uint32_t, std::int64_t)> walk = [&](std::uint32_t depth, std::int64_t sum) {
    if (depth == t) {
      ++total;
      hits += sum > x ? 1 : 0;
      return;
    }
    for (auto c : counts) walk(depth + 1, sum + c);
  };
  walk(0, 0);
  return Rational(BigInt(hits), BigInt(total));
}

double brute_force_knapsack(const std::vector<Item>& items, double capacity) {
  if (items.size() > 20) throw std::invalid_argument("brute_force_knapsack: too many items");
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << items.size()); ++mask) {
    double gain = 0.0;
    double cost = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (mask & (1u << i)) {
        gain += items[i].gain;
        cost += items[i].cost;
      }
    }
    if (cost <= capacity + 1e-12) best = std::max(best, gain);
  }
  return best;
}

Rational smallest_sum(std::vector<Rational> weights, std::uint32_t d) {
  std::sort(weights.begin(), weights.end());
  Rational out = 0;
  for (std::uint32_t i = 0; i < d && i < weights.size(); ++i) out += weights[i];
  return out;
}

double to_double(const Rational& x) { return x.convert_to<double>(); }

}  // namespace oracle
