#pragma once

// Within-slot decode race: the cartel holds the last r = m - Delta bundles
// of slot t* and must decode and act before the slot seals.

#include "pivotk/geometry.hpp"
#include "pivotk/probability.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace pivotk {

/// Arrival-time CDF of a contacted bundle within [0, window].
class ArrivalCdf {
 public:
  /// 1 - e^{-rate x}, renormalized to the window by default.
  static ArrivalCdf exponential(double rate, double window, bool renormalize = true);
  /// Linear interpolation through (x, F) knots; F is clamped to [0,1]
  /// outside the knots. Non-monotone knots are accepted and flagged.
  static ArrivalCdf piecewise_linear(std::vector<std::pair<double, double>> knots);

  double operator()(double x) const;
  bool monotone() const { return monotone_; }

 private:
  ArrivalCdf() = default;
  enum class Kind { exponential, piecewise } kind_ = Kind::exponential;
  double rate_ = 1.0;
  double window_ = 1.0;
  bool renormalize_ = true;
  std::vector<std::pair<double, double>> knots_;
  bool monotone_ = true;
};

class RaceModel {
 public:
  /// Requires 0 < seal <= slot and reaction >= 0.
  RaceModel(double slot_duration, double seal_deadline, double reaction_time, ArrivalCdf arrivals);

  double slot_duration() const { return slot_; }
  double seal_deadline() const { return seal_; }
  double reaction_time() const { return reaction_; }
  const ArrivalCdf& arrivals() const { return cdf_; }
  /// F(tau_seal - tau_0); zero when tau_0 >= tau_seal.
  double p() const;

 private:
  double slot_;
  double seal_;
  double reaction_;
  ArrivalCdf cdf_;
};

/// P[A >= r], A ~ Hypergeom(n, beta n, m), r = m - Delta.
Probability q_micro(const SystemInstance& instance, double beta);

/// rho(a, r) = P[Bin(a, p) >= r].
double rho_deadline(std::uint32_t a, std::uint32_t r, const RaceModel& race);

struct RhoBar {
  double value = 0.0;
  /// Set when the supremum was taken over the (a, r) grid only because the
  /// arrival CDF is not monotone.
  bool grid_only = false;
};

/// sup over a in [r, m], r in [1, m] of rho(a, r).
RhoBar rho_bar(const RaceModel& race, std::uint32_t m);

/// rho(r, r) = p^r, the floor when the cartel holds exactly r bundles.
double rho_floor(const RaceModel& race, std::uint32_t r);

struct GIncUpper {
  double bound = 0.0;               // rho_bar gamma^{t*-1} P[A >= r]
  Probability feasibility_tail;     // P[A >= r]
  std::optional<double> kl_alternative;  // exp{-m D(r/m || beta)} when r/m > beta
  std::optional<double> knife_edge_exact;  // C(beta n, m) / C(n, m) when Delta = 0
  std::optional<double> beta_power;        // beta^m when Delta = 0
};

GIncUpper g_inc_upper(const SystemInstance& instance, double beta, double rho_bar_value, double gamma);

/// gamma^{t*-1} rho_floor P[V >= r], with P[V >= r] supplied by the caller.
double g_inc_floor(const SystemInstance& instance, double rho_floor_value, double p_visibility, double gamma);

struct RaceSweepRow {
  std::uint32_t kappa = 0;
  std::uint32_t r = 0;
  double q_micro = 0.0;
  double g_inc_upper = 0.0;
  double g_inc_floor = 0.0;
};

/// Visibility defaults to V = A_{t*}, so P[V >= r] = q_micro.
std::vector<RaceSweepRow> race_sweep(std::uint32_t n, std::uint32_t m, double beta,
                                     const std::vector<std::uint32_t>& kappas, const RaceModel& race, double gamma);

}  // namespace pivotk
