#pragma once

// Exact laws of the lane-contact process: hypergeometric draws, their i.i.d.
// sums, binomial tails and the KL (Chernoff) exponents that bound them.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace pivotk {

/// A probability carried both linearly and in log-space. `value` may
/// underflow to zero while `log_value` stays finite.
struct Probability {
  double value = 0.0;
  double log_value = -std::numeric_limits<double>::infinity();

  static Probability from_log(double log_value);
  static Probability from_linear(double value);
  static Probability zero() { return {}; }
  static Probability one() { return {1.0, 0.0}; }

  operator double() const { return value; }  // NOLINT(google-explicit-constructor)
};

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// ln(n!) from an immutable table (built once, compensated), falling back to
/// lgamma past the table.
double log_factorial(std::uint64_t n);
double log_binomial(std::uint64_t n, std::uint64_t k);

/// Number of cartel lanes beta*n. Throws ValidationError when beta*n is not
/// integral, naming the nearest integral cartel size.
std::uint64_t cartel_size(std::uint64_t n, double beta);

class HypergeomLaw {
 public:
  HypergeomLaw(std::uint64_t population, std::uint64_t successes, std::uint64_t draws);

  std::uint64_t population() const { return population_; }
  std::uint64_t successes() const { return successes_; }
  std::uint64_t draws() const { return draws_; }
  std::int64_t support_min() const;
  std::int64_t support_max() const;
  double mean() const;

  double log_pmf(std::int64_t k) const;
  double pmf(std::int64_t k) const;
  /// P[A >= r], summed exactly over the support in log-space.
  Probability tail_ge(std::int64_t r) const;
  std::vector<double> pmf_vector() const;  // index k = 0 .. draws

 private:
  std::uint64_t population_;
  std::uint64_t successes_;
  std::uint64_t draws_;
};

double hypergeom_pmf(const HypergeomLaw& law, std::int64_t k);
Probability hypergeom_tail_ge(const HypergeomLaw& law, std::int64_t r);

/// Integer-supported law with masses on offset, offset+1, ...
class DiscreteDistribution {
 public:
  DiscreteDistribution(std::int64_t offset, std::vector<double> masses,
                       double mass_tolerance = 1e-12);

  std::int64_t offset() const { return offset_; }
  std::span<const double> masses() const { return masses_; }
  std::int64_t min() const { return offset_; }
  std::int64_t max() const { return offset_ + static_cast<std::int64_t>(masses_.size()) - 1; }

  double pmf(std::int64_t k) const;
  double total_mass() const;
  double mean() const;
  /// P[X >= r]
  double tail_ge(std::int64_t r) const;
  /// P[X > x]
  double tail_gt(std::int64_t x) const { return tail_ge(x + 1); }
  /// P[X <= x]
  double cdf(std::int64_t x) const;

  DiscreteDistribution convolve(const DiscreteDistribution& other) const;

  static DiscreteDistribution from(const HypergeomLaw& law);
  static DiscreteDistribution point_mass(std::int64_t at);

 private:
  std::int64_t offset_;
  std::vector<double> masses_;
};

/// Law of the sum of t i.i.d. copies of `law`; support [0, t*draws].
DiscreteDistribution convolve_iid(const HypergeomLaw& law, std::uint32_t t);

/// Bin(n, p) as a DiscreteDistribution on [0, n].
DiscreteDistribution binomial_law(std::uint64_t n, double p);

/// D(theta || beta) in nats, with 0 ln 0 = 0.
double kl_divergence(double theta, double beta);

enum class Tail { upper, lower };

/// exp{-t m D(theta || beta)}: bounds P[S_t/(tm) >= theta] (upper, theta >=
/// beta) or P[S_t/(tm) <= theta] (lower, theta <= beta).
double chernoff_tail_bound(std::uint32_t t, std::uint32_t m, double theta, double beta, Tail side);

/// P[Bin(n, p) >= r], exact summation.
Probability binomial_tail_ge(std::uint64_t n, double p, std::int64_t r);

}  // namespace pivotk
