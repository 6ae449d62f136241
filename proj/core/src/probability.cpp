#include "pivotk/probability.hpp"

#include "pivotk/error.hpp"
#include "pivotk/rational.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace pivotk {

namespace {

constexpr std::size_t kLogFactorialTableSize = 1U << 17;

const std::vector<double>& log_factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kLogFactorialTableSize);
    CompensatedSum acc;
    t[0] = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
      acc.add(std::log(static_cast<double>(i)));
      t[i] = acc.value();
    }
    return t;
  }();
  return table;
}

// log(sum(exp(terms))) with a compensated inner sum.
double log_sum_exp(std::span<const double> terms) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : terms) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  CompensatedSum acc;
  for (double x : terms) acc.add(std::exp(x - hi));
  return hi + std::log(acc.value());
}

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << what << " must lie in [0,1], got " << p;
    throw ValidationError(os.str());
  }
}

}  // namespace

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw ValidationError("cannot convert non-finite value to a rational");
  int exponent = 0;
  double mantissa = std::frexp(x, &exponent);
  // mantissa * 2^53 is an exact integer.
  auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational r{BigInt(scaled)};
  if (exponent > 0) {
    r *= Rational(BigInt(1) << exponent);
  } else if (exponent < 0) {
    r /= Rational(BigInt(1) << (-exponent));
  }
  return r;
}

Probability Probability::from_log(double log_value) {
  if (log_value > 0.0) log_value = 0.0;
  return {std::exp(log_value), log_value};
}

Probability Probability::from_linear(double value) {
  return {value, value > 0.0 ? std::log(value) : -std::numeric_limits<double>::infinity()};
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double log_factorial(std::uint64_t n) {
  const auto& table = log_factorial_table();
  if (n < table.size()) return table[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

std::uint64_t cartel_size(std::uint64_t n, double beta) {
  require_probability(beta, "beta");
  const double exact = beta * static_cast<double>(n);
  const double nearest = std::round(exact);
  if (std::abs(exact - nearest) > 1e-9 * std::max(1.0, exact)) {
    std::ostringstream os;
    os << "beta*n = " << exact << " is not an integral cartel size (n=" << n
       << "); nearest integral cartel size is " << nearest << " (beta=" << nearest / static_cast<double>(n)
       << ")";
    throw ValidationError(os.str());
  }
  return static_cast<std::uint64_t>(nearest);
}

// ---------------------------------------------------------------------------

HypergeomLaw::HypergeomLaw(std::uint64_t population, std::uint64_t successes, std::uint64_t draws)
    : population_(population), successes_(successes), draws_(draws) {
  if (population == 0) throw ValidationError("hypergeometric population must be positive");
  if (successes > population) {
    throw ValidationError("hypergeometric successes exceed population");
  }
  if (draws > population) throw ValidationError("hypergeometric draws exceed population");
}

std::int64_t HypergeomLaw::support_min() const {
  const auto lo = static_cast<std::int64_t>(draws_ + successes_) - static_cast<std::int64_t>(population_);
  return std::max<std::int64_t>(0, lo);
}

std::int64_t HypergeomLaw::support_max() const {
  return static_cast<std::int64_t>(std::min(draws_, successes_));
}

double HypergeomLaw::mean() const {
  return static_cast<double>(draws_) * static_cast<double>(successes_) / static_cast<double>(population_);
}

double HypergeomLaw::log_pmf(std::int64_t k) const {
  if (k < support_min() || k > support_max()) return -std::numeric_limits<double>::infinity();
  const auto uk = static_cast<std::uint64_t>(k);
  return log_binomial(successes_, uk) + log_binomial(population_ - successes_, draws_ - uk) -
         log_binomial(population_, draws_);
}

double HypergeomLaw::pmf(std::int64_t k) const { return std::exp(log_pmf(k)); }

Probability HypergeomLaw::tail_ge(std::int64_t r) const {
  const std::int64_t lo = std::max(r, support_min());
  const std::int64_t hi = support_max();
  if (r <= support_min()) return Probability::one();
  if (lo > hi) return Probability::zero();
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t k = lo; k <= hi; ++k) terms.push_back(log_pmf(k));
  return Probability::from_log(log_sum_exp(terms));
}

std::vector<double> HypergeomLaw::pmf_vector() const {
  std::vector<double> out(draws_ + 1, 0.0);
  for (std::int64_t k = support_min(); k <= support_max(); ++k) out[static_cast<std::size_t>(k)] = pmf(k);
  return out;
}

double hypergeom_pmf(const HypergeomLaw& law, std::int64_t k) { return law.pmf(k); }

Probability hypergeom_tail_ge(const HypergeomLaw& law, std::int64_t r) { return law.tail_ge(r); }

// ---------------------------------------------------------------------------

DiscreteDistribution::DiscreteDistribution(std::int64_t offset, std::vector<double> masses,
                                           double mass_tolerance)
    : offset_(offset), masses_(std::move(masses)) {
  if (masses_.empty()) throw ValidationError("distribution needs at least one mass point");
  for (double p : masses_) {
    if (!(p >= 0.0) || p > 1.0 + 1e-12) throw ValidationError("distribution masses must lie in [0,1]");
  }
  if (std::abs(total_mass() - 1.0) > mass_tolerance) {
    std::ostringstream os;
    os << "distribution masses sum to " << total_mass() << ", not 1";
    throw ValidationError(os.str());
  }
}

double DiscreteDistribution::pmf(std::int64_t k) const {
  if (k < min() || k > max()) return 0.0;
  return masses_[static_cast<std::size_t>(k - offset_)];
}

double DiscreteDistribution::total_mass() const {
  CompensatedSum acc;
  for (double p : masses_) acc.add(p);
  return acc.value();
}

double DiscreteDistribution::mean() const {
  CompensatedSum acc;
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    acc.add(masses_[i] * static_cast<double>(offset_ + static_cast<std::int64_t>(i)));
  }
  return acc.value();
}

double DiscreteDistribution::tail_ge(std::int64_t r) const {
  if (r <= min()) return std::min(1.0, total_mass());
  if (r > max()) return 0.0;
  CompensatedSum acc;
  for (std::int64_t k = r; k <= max(); ++k) acc.add(pmf(k));
  return std::min(1.0, acc.value());
}

double DiscreteDistribution::cdf(std::int64_t x) const {
  if (x < min()) return 0.0;
  if (x >= max()) return std::min(1.0, total_mass());
  CompensatedSum acc;
  for (std::int64_t k = min(); k <= x; ++k) acc.add(pmf(k));
  return std::min(1.0, acc.value());
}

DiscreteDistribution DiscreteDistribution::convolve(const DiscreteDistribution& other) const {
  std::vector<double> out(masses_.size() + other.masses_.size() - 1, 0.0);
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    if (masses_[i] == 0.0) continue;
    for (std::size_t j = 0; j < other.masses_.size(); ++j) out[i + j] += masses_[i] * other.masses_[j];
  }
  return DiscreteDistribution(offset_ + other.offset_, std::move(out), 1e-9);
}

DiscreteDistribution DiscreteDistribution::from(const HypergeomLaw& law) {
  return DiscreteDistribution(0, law.pmf_vector());
}

DiscreteDistribution DiscreteDistribution::point_mass(std::int64_t at) {
  return DiscreteDistribution(at, {1.0});
}

DiscreteDistribution convolve_iid(const HypergeomLaw& law, std::uint32_t t) {
  if (t == 0) throw ValidationError("convolve_iid needs t >= 1");
  const DiscreteDistribution single = DiscreteDistribution::from(law);
  DiscreteDistribution acc = single;
  for (std::uint32_t i = 1; i < t; ++i) acc = acc.convolve(single);
  return acc;
}

DiscreteDistribution binomial_law(std::uint64_t n, double p) {
  require_probability(p, "binomial p");
  std::vector<double> masses(n + 1, 0.0);
  if (p == 0.0) {
    masses[0] = 1.0;
  } else if (p == 1.0) {
    masses[n] = 1.0;
  } else {
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    for (std::uint64_t k = 0; k <= n; ++k) {
      masses[k] = std::exp(log_binomial(n, k) + static_cast<double>(k) * lp + static_cast<double>(n - k) * lq);
    }
  }
  return DiscreteDistribution(0, std::move(masses), 1e-9);
}

double kl_divergence(double theta, double beta) {
  require_probability(theta, "theta");
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("KL divergence needs beta in (0,1)");
  double d = 0.0;
  if (theta > 0.0) d += theta * std::log(theta / beta);
  if (theta < 1.0) d += (1.0 - theta) * std::log((1.0 - theta) / (1.0 - beta));
  return std::max(0.0, d);
}

double chernoff_tail_bound(std::uint32_t t, std::uint32_t m, double theta, double beta, Tail side) {
  if (t == 0 || m == 0) throw ValidationError("chernoff bound needs t >= 1 and m >= 1");
  if (side == Tail::upper && theta < beta) {
    throw ValidationError("upper-tail Chernoff bound needs theta >= beta");
  }
  if (side == Tail::lower && theta > beta) {
    throw ValidationError("lower-tail Chernoff bound needs theta <= beta");
  }
  const double exponent = static_cast<double>(t) * static_cast<double>(m) * kl_divergence(theta, beta);
  return std::exp(-exponent);
}

Probability binomial_tail_ge(std::uint64_t n, double p, std::int64_t r) {
  require_probability(p, "binomial p");
  if (r <= 0) return Probability::one();
  if (static_cast<std::uint64_t>(r) > n) return Probability::zero();
  if (p == 0.0) return Probability::zero();
  if (p == 1.0) return Probability::one();
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  std::vector<double> terms;
  for (auto k = static_cast<std::uint64_t>(r); k <= n; ++k) {
    terms.push_back(log_binomial(n, k) + static_cast<double>(k) * lp + static_cast<double>(n - k) * lq);
  }
  return Probability::from_log(log_sum_exp(terms));
}

}  // namespace pivotk
