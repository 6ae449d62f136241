#include "pivotk/incentives.hpp"

#include "pivotk/delay.hpp"
#include "pivotk/error.hpp"
#include "pivotk/rational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pivotk {

namespace {

void require_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream os;
    os << what << " must lie in [0,1], got " << x;
    throw ValidationError(os.str());
  }
}

double horizon_discount(const SystemInstance& instance, double gamma) {
  return std::pow(gamma, static_cast<double>(instance.t_star()));
}

}  // namespace

EconParams EconParams::normalized(double proposer_fee, double alpha, double value, double gamma, double bounty,
                                  std::optional<double> bundle_fee) {
  EconParams e;
  e.proposer_fee_ = proposer_fee;
  e.bundle_fee_ = bundle_fee.value_or(proposer_fee);
  e.alpha_ = alpha;
  e.value_ = value;
  e.gamma_ = gamma;
  e.bounty_ = bounty;
  e.validate();
  return e;
}

EconParams EconParams::from_bytes(const ByteModel& bytes, double alpha, double value, double gamma, double bounty) {
  EconParams e;
  e.bytes_ = bytes;
  e.bundle_fee_ = bytes.price_per_byte * static_cast<double>(bytes.bundle_bytes());
  e.proposer_fee_ = bytes.proposer_share * e.bundle_fee_;
  e.alpha_ = alpha;
  e.value_ = value;
  e.gamma_ = gamma;
  e.bounty_ = bounty;
  e.validate();
  return e;
}

void EconParams::validate() const {
  if (bytes_) {
    if (bytes_->price_per_byte < 0.0) throw ValidationError("per-byte price must be nonnegative");
    require_unit(bytes_->proposer_share, "proposer share phi");
    if (bytes_->symbols_per_bundle == 0) throw ValidationError("symbols per bundle must be positive");
  }
  if (proposer_fee_ < 0.0) throw ValidationError("proposer fee must be nonnegative");
  if (proposer_fee_ > bundle_fee_ * (1.0 + 1e-12)) throw ValidationError("proposer fee f exceeds bundle fee p");
  require_unit(alpha_, "alpha");
  if (!(value_ > 0.0)) throw ValidationError("transaction value v must be positive");
  if (!(gamma_ > 0.0 && gamma_ < 1.0)) throw ValidationError("discount gamma must lie in (0,1)");
  if (bounty_ < 0.0) throw ValidationError("bounty B must be nonnegative");
}

EconParams EconParams::with_bounty(double bounty) const {
  EconParams e = *this;
  e.bounty_ = bounty;
  e.validate();
  return e;
}

EconParams EconParams::with_alpha(double alpha) const {
  EconParams e = *this;
  e.alpha_ = alpha;
  e.validate();
  return e;
}

EconParams EconParams::with_net_nonneg(bool assumed) const {
  EconParams e = *this;
  e.net_nonneg_ = assumed;
  return e;
}

double EconParams::proposer_fee() const { return proposer_fee_; }
double EconParams::bundle_fee() const { return bundle_fee_; }
double EconParams::proposer_share() const {
  if (bytes_) return bytes_->proposer_share;
  return bundle_fee_ > 0.0 ? proposer_fee_ / bundle_fee_ : 0.0;
}

// ---------------------------------------------------------------------------

double pi_share(double w, double beta) {
  require_unit(w, "inclusion rate w");
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("beta must lie in (0,1)");
  return w * beta / (1.0 - beta + w * beta);
}

double fee_revenue_upper(double w, double beta, std::uint32_t m, double proposer_fee, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in (0,1)");
  return proposer_fee * w * beta * static_cast<double>(m) / (1.0 - gamma);
}

double bounty_gap_lower(double w, const SystemInstance& instance, double beta, double bounty, double gamma) {
  const double slack_term = static_cast<double>(instance.m()) / instance.kappa();
  return horizon_discount(instance, gamma) * (beta - pi_share(w, beta) - slack_term) * bounty;
}

IcCheck ic_stationary_check(const SystemInstance& instance, double beta, const EconParams& econ, double w,
                            double q_w) {
  if (!(w >= 0.0 && w < 1.0)) throw ValidationError("stationary IC check needs w in [0,1)");
  IcCheck c;
  c.w = w;
  c.q_w = q_w;
  c.lhs = (beta - pi_share(w, beta) - static_cast<double>(instance.m()) / instance.kappa()) * econ.bounty();
  c.rhs = econ.alpha_v() * q_w;
  c.margin = c.lhs - c.rhs;
  c.satisfied = c.margin >= 0.0;
  return c;
}

IcSweep ic_stationary_sweep(const SystemInstance& instance, double beta, const EconParams& econ,
                            std::uint32_t grid_points) {
  if (grid_points == 0) throw ValidationError("w-grid needs at least one point");
  IcSweep sweep;
  sweep.points.reserve(grid_points);
  for (std::uint32_t i = 0; i < grid_points; ++i) {
    const Rational w = make_rational(i, grid_points);
    const double q_w = fluid_delay_report(instance, beta, w).exact_probability;
    sweep.points.push_back(ic_stationary_check(instance, beta, econ, to_double(w), q_w));
  }
  sweep.worst = *std::min_element(sweep.points.begin(), sweep.points.end(),
                                  [](const IcCheck& a, const IcCheck& b) { return a.margin < b.margin; });
  sweep.all_satisfied = sweep.worst.satisfied;
  return sweep;
}

KnifeEdgeThreshold knife_edge_bounty_threshold(const SystemInstance& instance, double beta, const EconParams& econ,
                                               double q0) {
  if (!instance.knife_edge()) throw ValidationError("knife-edge bounty threshold requires Delta = 0");
  require_unit(q0, "q0");
  const double g = econ.gamma();
  const double f = econ.proposer_fee();
  const double m = instance.m();
  const double kappa = instance.kappa();
  const double numer = q0 * (econ.alpha_v() - f / g + beta * m * f);
  const double denom = (1.0 - g) * beta + g * (1.0 - beta) * q0 / kappa;
  if (!(denom > 0.0)) throw ValidationError("knife-edge threshold denominator vanishes (beta = 0 and q0 = 0)");

  KnifeEdgeThreshold out;
  out.q0 = q0;
  out.threshold = numer / denom;
  const double gt = horizon_discount(instance, g);
  const double B = out.threshold;
  out.net_fee_sacrifice = q0 * (gt / g * f - gt * beta * m * f);
  out.bounty_discount_loss = gt * (1.0 - g) * beta * B;
  out.lost_pivotal_share = gt * g * (1.0 - beta) * q0 / kappa * B;
  out.mev_option = econ.alpha_v() * gt * q0;
  return out;
}

std::optional<double> coalition_sufficient_bounty(const SystemInstance& instance, const EconParams& econ) {
  if (instance.knife_edge()) return std::nullopt;
  const double pie = econ.alpha_v() * horizon_discount(instance, econ.gamma());
  const double fees = (instance.slack() + 1.0) * econ.proposer_fee();
  return instance.kappa() * std::max(0.0, pie - fees);
}

double coalition_loss_floor(std::uint32_t withheld, const SystemInstance& instance, const EconParams& econ) {
  const double pivotal_removed = withheld > instance.slack() ? static_cast<double>(withheld - instance.slack()) : 0.0;
  return withheld * econ.proposer_fee() + pivotal_removed / instance.kappa() * econ.bounty();
}

double equal_share(const EconParams& econ, const SystemInstance& instance) {
  return econ.alpha_v() * horizon_discount(instance, econ.gamma()) / (instance.slack() + 1.0);
}

PhiThreshold phi_threshold(const SystemInstance& instance, double beta, const EconParams& econ, double q0) {
  const double g = econ.gamma();
  const double gt = horizon_discount(instance, g);
  const double denom = econ.bundle_fee() * beta * instance.m() * (1.0 - gt);
  if (!(denom > 0.0)) throw ValidationError("phi threshold needs c L(s) > 0 and beta > 0");
  PhiThreshold out;
  out.value = econ.alpha_v() * gt * q0 * (1.0 - g) / denom;
  out.feasible = out.value <= 1.0;
  return out;
}

double sender_ir_bound(const SystemInstance& instance, const EconParams& econ, double q0,
                       double expected_discount_T0) {
  const double gt = horizon_discount(instance, econ.gamma());
  return econ.value() * (gt - expected_discount_T0) + econ.alpha_v() * gt * q0;
}

// ---------------------------------------------------------------------------

double InclusionTimeLaw::expected_discount(double gamma) const {
  CompensatedSum acc;
  for (std::int64_t t = law.min(); t <= law.max(); ++t) acc.add(law.pmf(t) * std::pow(gamma, static_cast<double>(t)));
  return acc.value();
}

std::uint32_t default_T0_cap(const SystemInstance& instance) { return 64 * instance.t_star(); }

namespace {

// Alive mass per honest-count state h in [0, kappa); one slot step.
struct HonestAccumulation {
  std::vector<double> honest_pmf;  // P[H = h]
  std::vector<double> alive;
  std::uint32_t kappa;

  double step() {
    std::vector<double> next(alive.size(), 0.0);
    CompensatedSum absorbed;
    for (std::size_t h = 0; h < alive.size(); ++h) {
      if (alive[h] == 0.0) continue;
      for (std::size_t k = 0; k < honest_pmf.size(); ++k) {
        const double p = alive[h] * honest_pmf[k];
        if (h + k >= kappa) {
          absorbed.add(p);
        } else {
          next[h + k] += p;
        }
      }
    }
    alive = std::move(next);
    return absorbed.value();
  }

  double alive_mass() const {
    CompensatedSum acc;
    for (double p : alive) acc.add(p);
    return acc.value();
  }
};

}  // namespace

InclusionTimeLaw distribution_of_T0(const SystemInstance& instance, double beta, std::uint32_t horizon_cap) {
  if (horizon_cap < instance.t_star()) {
    throw ValidationError("horizon cap " + std::to_string(horizon_cap) + " is below t* = " +
                          std::to_string(instance.t_star()));
  }
  const auto cartel = cartel_size(instance.n(), beta);
  if (cartel >= instance.n()) throw ValidationError("T(0) is infinite when every lane is in the cartel");
  const HypergeomLaw contacts(instance.n(), cartel, instance.m());
  HonestAccumulation dp;
  dp.kappa = instance.kappa();
  dp.honest_pmf.assign(instance.m() + 1, 0.0);
  for (std::int64_t a = contacts.support_min(); a <= contacts.support_max(); ++a) {
    dp.honest_pmf[instance.m() - static_cast<std::size_t>(a)] = contacts.pmf(a);
  }
  dp.alive.assign(instance.kappa(), 0.0);
  dp.alive[0] = 1.0;

  std::vector<double> masses;
  for (std::uint32_t t = 1; t <= horizon_cap; ++t) {
    const double absorbed = dp.step();
    if (t >= instance.t_star()) masses.push_back(absorbed);
  }
  const double residual = dp.alive_mass();
  constexpr double kResidualTolerance = 1e-9;
  if (residual >= kResidualTolerance) {
    std::uint64_t suggested = horizon_cap;
    constexpr std::uint64_t kSearchLimit = 1'000'000;
    while (dp.alive_mass() >= kResidualTolerance && suggested < kSearchLimit) {
      dp.step();
      ++suggested;
    }
    std::ostringstream os;
    os << "horizon cap " << horizon_cap << " leaves residual mass " << residual << " >= 1e-9; use a cap of at least "
       << suggested;
    throw ValidationError(os.str());
  }
  return InclusionTimeLaw{DiscreteDistribution(instance.t_star(), std::move(masses), kResidualTolerance), residual,
                          horizon_cap};
}

BountyProxies bounty_proxies(double beta, const EconParams& econ, double q0, double q_rat) {
  if (!(beta > 0.0)) throw ValidationError("bounty proxies need beta > 0");
  const double scale = econ.alpha_v() / beta;
  return {scale * q0, scale * q_rat};
}

// ---------------------------------------------------------------------------

BountyPrior BountyPrior::piecewise_linear(std::vector<std::pair<double, double>> knots, double utility_included,
                                          double utility_withheld) {
  if (knots.empty()) throw ValidationError("prior CDF needs at least one knot");
  if (knots.front().first < 0.0) throw ValidationError("prior CDF must vanish below zero (F(0-) = 0)");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto [x, F] = knots[i];
    require_unit(F, "prior CDF value");
    if (i > 0 && (x < knots[i - 1].first || F < knots[i - 1].second)) {
      throw ValidationError("prior CDF knots must be nondecreasing");
    }
  }
  if (knots.back().second != 1.0) throw ValidationError("prior CDF must reach 1");
  BountyPrior p;
  p.knots_ = std::move(knots);
  p.u_inc_ = utility_included;
  p.u_wh_ = utility_withheld;
  return p;
}

BountyPrior BountyPrior::uniform(double lo, double hi, double utility_included, double utility_withheld) {
  if (!(hi > lo)) throw ValidationError("uniform prior needs hi > lo");
  return piecewise_linear({{lo, 0.0}, {hi, 1.0}}, utility_included, utility_withheld);
}

BountyPrior BountyPrior::point_mass(double at, double utility_included, double utility_withheld) {
  return piecewise_linear({{at, 0.0}, {at, 1.0}}, utility_included, utility_withheld);
}

double BountyPrior::cdf(double b) const {
  if (b < knots_.front().first) return 0.0;
  if (b >= knots_.back().first) return 1.0;
  // Right-continuous: the last knot with x <= b carries the value at b.
  auto upper = std::upper_bound(knots_.begin(), knots_.end(), b,
                                [](double v, const std::pair<double, double>& k) { return v < k.first; });
  const auto& right = *upper;
  const auto& left = *(upper - 1);
  if (right.first == left.first) return left.second;
  const double frac = (b - left.first) / (right.first - left.first);
  return left.second + frac * (right.second - left.second);
}

std::vector<double> BountyPrior::breakpoints() const {
  std::vector<double> out;
  for (const auto& k : knots_) {
    if (out.empty() || out.back() != k.first) out.push_back(k.first);
  }
  return out;
}

double BountyPrior::expected_utility(double bounty) const {
  const double F = cdf(bounty);
  return F * (u_inc_ - bounty) + (1.0 - F) * u_wh_;
}

BayesBounty bayesian_optimal_bounty(const BountyPrior& prior, double grid_resolution) {
  if (!(grid_resolution > 0.0)) throw ValidationError("grid resolution must be positive");
  const double span = prior.utility_included() - prior.utility_withheld();
  if (span <= 0.0) return {0.0, prior.expected_utility(0.0), std::nullopt};

  // Posting more than U_inc - U_wh never beats posting nothing.
  double best_b = 0.0;
  double best_u = prior.expected_utility(0.0);
  auto consider = [&](double b) {
    if (b < 0.0 || b > span) return;
    const double u = prior.expected_utility(b);
    if (u > best_u) {
      best_u = u;
      best_b = b;
    }
  };
  const auto steps = static_cast<std::uint64_t>(std::ceil(span / grid_resolution));
  for (std::uint64_t i = 0; i <= steps; ++i) consider(std::min(span, static_cast<double>(i) * grid_resolution));
  for (double b : prior.breakpoints()) consider(b);

  // Golden-section refinement inside the bracket around the best candidate.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::max(0.0, best_b - grid_resolution);
  double hi = std::min(span, best_b + grid_resolution);
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = prior.expected_utility(x1);
  double f2 = prior.expected_utility(x2);
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = prior.expected_utility(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = prior.expected_utility(x1);
    }
  }
  consider(0.5 * (lo + hi));

  BayesBounty out{best_b, best_u, std::nullopt};
  const double h = std::max(1e-9, grid_resolution * 1e-3);
  if (best_b - h >= 0.0) {
    const double left = prior.cdf(best_b - h);
    const double mid = prior.cdf(best_b);
    const double right = prior.cdf(best_b + h);
    // Only where F is continuous at the optimum (no atom).
    if (std::abs((right - mid) - (mid - left)) <= 1e-6 + 1e-3 * std::abs(right - left)) {
      const double density = (right - left) / (2.0 * h);
      out.foc_residual = density * (span - best_b) - mid;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::int64_t to_grid(double x, double resolution, bool round_up) {
  const double units = x / resolution;
  const double nearest = std::round(units);
  if (std::abs(units - nearest) <= 1e-9 * std::max(1.0, std::abs(units))) return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(round_up ? std::ceil(units) : std::floor(units));
}

}  // namespace

KnapsackSelection knapsack_select(std::span<const AttackItem> items, double capacity, double resolution) {
  if (capacity < 0.0) throw ValidationError("knapsack capacity must be nonnegative");
  if (!(resolution > 0.0)) throw ValidationError("knapsack resolution must be positive");
  const std::int64_t cap = to_grid(capacity, resolution, false);
  constexpr std::int64_t kMaxCells = 50'000'000;
  if (static_cast<double>(cap + 1) * static_cast<double>(items.size() + 1) > kMaxCells) {
    throw ValidationError("knapsack table too large; use a coarser cost resolution");
  }
  std::vector<std::int64_t> weight(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].cost < 0.0) throw ValidationError("attack costs must be nonnegative");
    weight[i] = to_grid(items[i].cost, resolution, true);
  }
  const auto width = static_cast<std::size_t>(cap + 1);
  // best[i][c]: max gain using items [0, i) within capacity c.
  std::vector<std::vector<double>> best(items.size() + 1, std::vector<double>(width, 0.0));
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t c = 0; c < width; ++c) {
      best[i + 1][c] = best[i][c];
      if (items[i].gain > 0.0 && weight[i] <= static_cast<std::int64_t>(c)) {
        best[i + 1][c] = std::max(best[i + 1][c], best[i][c - static_cast<std::size_t>(weight[i])] + items[i].gain);
      }
    }
  }
  KnapsackSelection out;
  std::size_t c = width - 1;
  for (std::size_t i = items.size(); i-- > 0;) {
    if (best[i + 1][c] != best[i][c]) {
      out.selected.push_back(i);
      c -= static_cast<std::size_t>(weight[i]);
    }
  }
  std::reverse(out.selected.begin(), out.selected.end());
  for (std::size_t i : out.selected) {
    out.total_gain += items[i].gain;
    out.total_cost += items[i].cost;
  }
  return out;
}

}  // namespace pivotk
