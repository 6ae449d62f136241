#include "pivotk/intra_slot.hpp"

#include "pivotk/error.hpp"

#include <algorithm>
#include <cmath>

namespace pivotk {

ArrivalCdf ArrivalCdf::exponential(double rate, double window, bool renormalize) {
  if (!(rate > 0.0)) throw ValidationError("arrival rate must be positive");
  if (!(window > 0.0)) throw ValidationError("arrival window must be positive");
  ArrivalCdf cdf;
  cdf.kind_ = Kind::exponential;
  cdf.rate_ = rate;
  cdf.window_ = window;
  cdf.renormalize_ = renormalize;
  return cdf;
}

ArrivalCdf ArrivalCdf::piecewise_linear(std::vector<std::pair<double, double>> knots) {
  if (knots.empty()) throw ValidationError("arrival CDF needs at least one knot");
  ArrivalCdf cdf;
  cdf.kind_ = Kind::piecewise;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (knots[i].second < 0.0 || knots[i].second > 1.0) throw ValidationError("arrival CDF values must lie in [0,1]");
    if (i > 0) {
      if (knots[i].first <= knots[i - 1].first) throw ValidationError("arrival CDF knots need increasing times");
      if (knots[i].second < knots[i - 1].second) cdf.monotone_ = false;
    }
  }
  cdf.knots_ = std::move(knots);
  return cdf;
}

double ArrivalCdf::operator()(double x) const {
  if (kind_ == Kind::exponential) {
    if (x <= 0.0) return 0.0;
    const double xx = std::min(x, window_);
    const double raw = -std::expm1(-rate_ * xx);
    if (!renormalize_) return raw;
    return raw / -std::expm1(-rate_ * window_);
  }
  if (x <= knots_.front().first) return x < knots_.front().first ? 0.0 : knots_.front().second;
  if (x >= knots_.back().first) return knots_.back().second;
  auto hi = std::upper_bound(knots_.begin(), knots_.end(), x,
                             [](double v, const std::pair<double, double>& k) { return v < k.first; });
  auto lo = hi - 1;
  const double frac = (x - lo->first) / (hi->first - lo->first);
  return lo->second + frac * (hi->second - lo->second);
}

RaceModel::RaceModel(double slot_duration, double seal_deadline, double reaction_time, ArrivalCdf arrivals)
    : slot_(slot_duration), seal_(seal_deadline), reaction_(reaction_time), cdf_(std::move(arrivals)) {
  if (!(seal_ > 0.0 && seal_ <= slot_)) throw ValidationError("seal deadline must lie in (0, slot duration]");
  if (!(reaction_ >= 0.0)) throw ValidationError("reaction time must be nonnegative");
}

double RaceModel::p() const {
  if (reaction_ >= seal_) return 0.0;
  return std::clamp(cdf_(seal_ - reaction_), 0.0, 1.0);
}

Probability q_micro(const SystemInstance& instance, double beta) {
  const HypergeomLaw law(instance.n(), cartel_size(instance.n(), beta), instance.m());
  return law.tail_ge(instance.final_deficit());
}

double rho_deadline(std::uint32_t a, std::uint32_t r, const RaceModel& race) {
  if (r == 0) throw ValidationError("rho(a, r) needs r >= 1");
  return binomial_tail_ge(a, race.p(), r).value;
}

RhoBar rho_bar(const RaceModel& race, std::uint32_t m) {
  if (m == 0) throw ValidationError("rho_bar needs m >= 1");
  RhoBar out;
  out.grid_only = !race.arrivals().monotone();
  for (std::uint32_t r = 1; r <= m; ++r) {
    for (std::uint32_t a = r; a <= m; ++a) out.value = std::max(out.value, rho_deadline(a, r, race));
  }
  return out;
}

double rho_floor(const RaceModel& race, std::uint32_t r) { return rho_deadline(r, r, race); }

GIncUpper g_inc_upper(const SystemInstance& instance, double beta, double rho_bar_value, double gamma) {
  if (!(rho_bar_value >= 0.0 && rho_bar_value <= 1.0)) throw ValidationError("rho_bar must lie in [0,1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in (0,1]");
  GIncUpper out;
  out.feasibility_tail = q_micro(instance, beta);
  const double discount = std::pow(gamma, static_cast<double>(instance.t_star()) - 1.0);
  out.bound = rho_bar_value * discount * out.feasibility_tail.value;
  const double share = static_cast<double>(instance.final_deficit()) / instance.m();
  if (share > beta && beta > 0.0 && beta < 1.0) out.kl_alternative = std::exp(-instance.m() * kl_divergence(share, beta));
  if (instance.knife_edge()) {
    out.knife_edge_exact = out.feasibility_tail.value;
    out.beta_power = std::pow(beta, static_cast<double>(instance.m()));
  }
  return out;
}

double g_inc_floor(const SystemInstance& instance, double rho_floor_value, double p_visibility, double gamma) {
  if (!(rho_floor_value >= 0.0 && rho_floor_value <= 1.0)) throw ValidationError("rho_floor must lie in [0,1]");
  if (!(p_visibility >= 0.0 && p_visibility <= 1.0)) throw ValidationError("visibility probability must lie in [0,1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in (0,1]");
  return std::pow(gamma, static_cast<double>(instance.t_star()) - 1.0) * rho_floor_value * p_visibility;
}

std::vector<RaceSweepRow> race_sweep(std::uint32_t n, std::uint32_t m, double beta,
                                     const std::vector<std::uint32_t>& kappas, const RaceModel& race, double gamma) {
  const double bar = rho_bar(race, m).value;
  std::vector<RaceSweepRow> rows;
  rows.reserve(kappas.size());
  for (std::uint32_t kappa : kappas) {
    const auto instance = SystemInstance::from_kappa(n, m, kappa);
    RaceSweepRow row;
    row.kappa = kappa;
    row.r = instance.final_deficit();
    row.q_micro = q_micro(instance, beta).value;
    row.g_inc_upper = g_inc_upper(instance, beta, bar, gamma).bound;
    row.g_inc_floor = g_inc_floor(instance, rho_floor(race, row.r), row.q_micro, gamma);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pivotk
