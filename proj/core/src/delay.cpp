#include "pivotk/delay.hpp"

#include "pivotk/error.hpp"

#include <cmath>

namespace pivotk {

namespace {

HypergeomLaw slot_law(const SystemInstance& instance, double beta) {
  return HypergeomLaw(instance.n(), cartel_size(instance.n(), beta), instance.m());
}

}  // namespace

std::string_view to_string(DelayRegime regime) {
  switch (regime) {
    case DelayRegime::delay_rare: return "delay_rare";
    case DelayRegime::delay_likely: return "delay_likely";
    case DelayRegime::impossible: return "impossible";
    case DelayRegime::degenerate: return "degenerate";
  }
  return "unknown";
}

DiscreteDistribution horizon_cartel_contacts(const SystemInstance& instance, double beta) {
  return convolve_iid(slot_law(instance, beta), instance.t_star());
}

double exact_q0(const SystemInstance& instance, double beta) {
  const auto law = slot_law(instance, beta);
  if (law.successes() == 0) return 0.0;
  return horizon_cartel_contacts(instance, beta).tail_gt(instance.slack());
}

double knife_edge_q0(const SystemInstance& instance, double beta) {
  if (!instance.knife_edge()) throw ValidationError("knife_edge_q0 requires Delta = 0");
  const auto cartel = cartel_size(instance.n(), beta);
  const double log_no_contact = log_binomial(instance.n() - cartel, instance.m()) - log_binomial(instance.n(), instance.m());
  return -std::expm1(static_cast<double>(instance.t_star()) * log_no_contact);
}

DelayReport fluid_delay_report(const SystemInstance& instance, double beta, const Rational& w) {
  if (w < 0 || w >= 1) throw ValidationError("fluid delay model needs w in [0,1)");
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("fluid delay model needs beta in (0,1)");
  const auto cartel = cartel_size(instance.n(), beta);
  const Rational beta_exact = make_rational(static_cast<std::int64_t>(cartel), instance.n());
  const Rational withheld_share = 1 - w;
  const Rational horizon_mass = make_rational(static_cast<std::int64_t>(instance.t_star()) * instance.m());
  const Rational theta = make_rational(instance.slack()) / (withheld_share * horizon_mass);

  DelayReport report;
  report.theta_w = to_double(theta);

  // (1-w) S > Delta  <=>  S > Delta/(1-w)  <=>  S >= floor(Delta/(1-w)) + 1
  const Rational ratio = make_rational(instance.slack()) / withheld_share;
  const BigInt floor_ratio = numerator(ratio) / denominator(ratio);
  report.contact_threshold = floor_ratio.convert_to<std::int64_t>() + 1;

  if (theta >= 1) {
    report.regime = DelayRegime::impossible;
    report.exact_probability = 0.0;
    return report;
  }
  const auto contacts = horizon_cartel_contacts(instance, beta);
  report.exact_probability = contacts.tail_ge(report.contact_threshold);
  if (theta > beta_exact) {
    report.regime = DelayRegime::delay_rare;
    report.kl_bound = chernoff_tail_bound(instance.t_star(), instance.m(), report.theta_w, beta, Tail::upper);
  } else if (theta < beta_exact) {
    report.regime = DelayRegime::delay_likely;
    report.kl_bound = chernoff_tail_bound(instance.t_star(), instance.m(), report.theta_w, beta, Tail::lower);
  } else {
    report.regime = DelayRegime::degenerate;
  }
  return report;
}

DelayReport fluid_delay_report(const SystemInstance& instance, double beta, double w) {
  return fluid_delay_report(instance, beta, exact_rational(w));
}

double no_delay_upper(const SystemInstance& instance, double beta) {
  const auto cartel = cartel_size(instance.n(), beta);
  const double horizon_mass = static_cast<double>(instance.t_star()) * instance.m();
  // Delta/(t* m) >= beta, compared exactly: Delta * n >= cartel * t* m.
  if (static_cast<std::uint64_t>(instance.slack()) * instance.n() >=
      cartel * static_cast<std::uint64_t>(instance.t_star()) * instance.m()) {
    return 1.0;
  }
  const double theta = static_cast<double>(instance.slack()) / horizon_mass;
  return chernoff_tail_bound(instance.t_star(), instance.m(), theta, beta, Tail::lower);
}

}  // namespace pivotk
