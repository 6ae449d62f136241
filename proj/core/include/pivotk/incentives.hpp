#pragma once

// Closed-form incentive quantities: payoff bounds, stationary and knife-edge
// IC, coalition budgets, fee-only threshold, sender IR, bounty proxies, the
// Bayesian posted bounty and capacity-constrained attack selection.

#include "pivotk/geometry.hpp"
#include "pivotk/probability.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace pivotk {

/// Byte-level pricing of a bundle: L(s) = M_h + s (M_s + l_sym).
struct ByteModel {
  std::uint64_t header_bytes = 0;
  std::uint64_t metadata_bytes = 0;
  std::uint64_t symbol_bytes = 0;
  double price_per_byte = 0.0;
  double proposer_share = 1.0;
  std::uint32_t symbols_per_bundle = 1;

  std::uint64_t bundle_bytes() const { return header_bytes + symbols_per_bundle * (metadata_bytes + symbol_bytes); }
};

class EconParams {
 public:
  /// Fee units set directly (f = proposer_fee). bundle_fee defaults to f,
  /// i.e. the proposer keeps the whole bandwidth fee.
  static EconParams normalized(double proposer_fee, double alpha, double value, double gamma, double bounty = 0.0,
                               std::optional<double> bundle_fee = std::nullopt);
  static EconParams from_bytes(const ByteModel& bytes, double alpha, double value, double gamma,
                               double bounty = 0.0);

  EconParams with_bounty(double bounty) const;
  EconParams with_alpha(double alpha) const;
  EconParams with_net_nonneg(bool assumed) const;

  /// f = phi c L(s)
  double proposer_fee() const;
  /// p = c L(s)
  double bundle_fee() const;
  double proposer_share() const;
  const std::optional<ByteModel>& byte_model() const { return bytes_; }

  double alpha() const { return alpha_; }
  double value() const { return value_; }
  double alpha_v() const { return alpha_ * value_; }
  double gamma() const { return gamma_; }
  double bounty() const { return bounty_; }
  /// Nonnegative net marginal inclusion payoff (static fee market). Minimal
  /// sabotage conclusions are only valid when this holds.
  bool net_nonneg_assumed() const { return net_nonneg_; }

 private:
  EconParams() = default;
  void validate() const;

  std::optional<ByteModel> bytes_;
  double proposer_fee_ = 0.0;
  double bundle_fee_ = 0.0;
  double alpha_ = 0.0;
  double value_ = 1.0;
  double gamma_ = 0.99;
  double bounty_ = 0.0;
  bool net_nonneg_ = true;
};

/// pi(w) = w beta / (1 - beta + w beta): the cartel's expected share of
/// included bundles under Bernoulli thinning.
double pi_share(double w, double beta);

/// f w beta m / (1 - gamma)
double fee_revenue_upper(double w, double beta, std::uint32_t m, double proposer_fee, double gamma);

/// gamma^{t*} (beta - pi(w) - m/kappa) B; may be negative.
double bounty_gap_lower(double w, const SystemInstance& instance, double beta, double bounty, double gamma);

struct IcCheck {
  double w = 0.0;
  double q_w = 0.0;
  double lhs = 0.0;  // (beta - pi(w) - m/kappa) B
  double rhs = 0.0;  // alpha v q_w
  double margin = 0.0;
  bool satisfied = false;
};

IcCheck ic_stationary_check(const SystemInstance& instance, double beta, const EconParams& econ, double w,
                            double q_w);

struct IcSweep {
  std::vector<IcCheck> points;
  IcCheck worst;
  bool all_satisfied = false;
};

/// Evaluates the stationary IC condition on w = i/grid_points, i < grid_points,
/// with q_w from the exact fluid model.
IcSweep ic_stationary_sweep(const SystemInstance& instance, double beta, const EconParams& econ,
                            std::uint32_t grid_points = 101);

struct KnifeEdgeThreshold {
  double threshold = 0.0;
  double q0 = 0.0;
  // Components of the deviation's direct revenue sacrifice at B = threshold,
  // and the MEV option they must cover.
  double net_fee_sacrifice = 0.0;
  double bounty_discount_loss = 0.0;
  double lost_pivotal_share = 0.0;
  double mev_option = 0.0;
};

/// Minimum bounty deterring the one-bundle deviation on a knife edge.
/// Throws ValidationError when Delta > 0.
KnifeEdgeThreshold knife_edge_bounty_threshold(const SystemInstance& instance, double beta, const EconParams& econ,
                                               double q0);

/// kappa max(0, alpha v gamma^{t*} - (Delta+1) f) when Delta > 0; nullopt on
/// knife edges, where the coalition decomposition does not apply.
std::optional<double> coalition_sufficient_bounty(const SystemInstance& instance, const EconParams& econ);

/// c f + (c - Delta)^+ B / kappa
double coalition_loss_floor(std::uint32_t withheld, const SystemInstance& instance, const EconParams& econ);

/// alpha v gamma^{t*} / (Delta + 1)
double equal_share(const EconParams& econ, const SystemInstance& instance);

struct PhiThreshold {
  double value = 0.0;
  bool feasible = false;  // value <= 1
};

/// Smallest proposer share for which fees alone deter full withholding.
PhiThreshold phi_threshold(const SystemInstance& instance, double beta, const EconParams& econ, double q0);

/// v (gamma^{t*} - E[gamma^{T(0)}]) + alpha v gamma^{t*} q0
double sender_ir_bound(const SystemInstance& instance, const EconParams& econ, double q0,
                       double expected_discount_T0);

struct InclusionTimeLaw {
  DiscreteDistribution law;
  double residual_mass = 0.0;  // P[T(0) > horizon_cap]
  std::uint32_t horizon_cap = 0;

  double expected_discount(double gamma) const;
};

std::uint32_t default_T0_cap(const SystemInstance& instance);

/// Exact law of the full-withholding inclusion time T(0). Throws
/// ValidationError (with a suggested cap) when more than 1e-9 of the mass
/// lies beyond horizon_cap.
InclusionTimeLaw distribution_of_T0(const SystemInstance& instance, double beta, std::uint32_t horizon_cap);

struct BountyProxies {
  double static_proxy = 0.0;   // (alpha v / beta) q0
  double ratchet_proxy = 0.0;  // (alpha v / beta) q_rat
};

BountyProxies bounty_proxies(double beta, const EconParams& econ, double q0, double q_rat);

/// User prior over the cartel's inclusion threshold B*.
class BountyPrior {
 public:
  /// Piecewise-linear CDF through (x, F) knots; repeated x encodes a jump.
  static BountyPrior piecewise_linear(std::vector<std::pair<double, double>> knots, double utility_included,
                                      double utility_withheld);
  static BountyPrior uniform(double lo, double hi, double utility_included, double utility_withheld);
  static BountyPrior point_mass(double at, double utility_included, double utility_withheld);

  double cdf(double b) const;
  std::vector<double> breakpoints() const;
  double utility_included() const { return u_inc_; }
  double utility_withheld() const { return u_wh_; }
  /// F(B)(U_inc - B) + (1 - F(B)) U_wh
  double expected_utility(double bounty) const;

 private:
  BountyPrior() = default;
  std::vector<std::pair<double, double>> knots_;
  double u_inc_ = 0.0;
  double u_wh_ = 0.0;
};

struct BayesBounty {
  double bounty = 0.0;
  double expected_utility = 0.0;
  /// f(B)(U_inc - U_wh - B) - F(B) at the optimum, where F is differentiable.
  std::optional<double> foc_residual;
};

BayesBounty bayesian_optimal_bounty(const BountyPrior& prior, double grid_resolution);

struct AttackItem {
  double gain = 0.0;
  double cost = 0.0;
};

struct KnapsackSelection {
  std::vector<std::size_t> selected;  // ascending item indices
  double total_gain = 0.0;
  double total_cost = 0.0;
};

/// Exact 0-1 knapsack over costs discretized at `resolution` (item costs
/// rounded up, capacity rounded down unless already on the grid).
KnapsackSelection knapsack_select(std::span<const AttackItem> items, double capacity, double resolution = 1e-3);

}  // namespace pivotk
