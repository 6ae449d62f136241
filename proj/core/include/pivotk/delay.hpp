#pragma once

// Delay probabilities for a static sender under withholding.

#include "pivotk/geometry.hpp"
#include "pivotk/probability.hpp"
#include "pivotk/rational.hpp"

#include <optional>
#include <string_view>

namespace pivotk {

/// Law of the cumulative cartel contacts S_{t*}.
DiscreteDistribution horizon_cartel_contacts(const SystemInstance& instance, double beta);

/// q^(0) = P[S_{t*} > Delta]; the full-withholding delay probability.
double exact_q0(const SystemInstance& instance, double beta);

/// 1 - (C((1-beta)n, m) / C(n, m))^{t*}. Only defined on knife edges.
double knife_edge_q0(const SystemInstance& instance, double beta);

enum class DelayRegime { delay_rare, delay_likely, impossible, degenerate };

std::string_view to_string(DelayRegime regime);

struct DelayReport {
  double exact_probability = 0.0;
  /// Bounds exact_probability (delay_rare) or 1 - exact_probability
  /// (delay_likely). Absent for impossible and degenerate regimes.
  std::optional<double> kl_bound;
  DelayRegime regime = DelayRegime::impossible;
  double theta_w = 0.0;
  /// Delay occurs iff S_{t*} >= this count.
  std::int64_t contact_threshold = 0;
};

/// Fluid stationary model at inclusion rate w in [0,1). The strict event
/// (1-w) S > Delta is evaluated with exact rational arithmetic.
DelayReport fluid_delay_report(const SystemInstance& instance, double beta, const Rational& w);
/// Convenience overload; the double is converted exactly.
DelayReport fluid_delay_report(const SystemInstance& instance, double beta, double w);

/// Upper bound on 1 - q^(0); returns 1 when Delta/(t* m) >= beta.
double no_delay_upper(const SystemInstance& instance, double beta);

}  // namespace pivotk
