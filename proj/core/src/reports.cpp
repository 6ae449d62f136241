#include "pivotk/reports.hpp"

#include "pivotk/delay.hpp"
#include "pivotk/error.hpp"
#include "pivotk/incentives.hpp"
#include "pivotk/intra_slot.hpp"
#include "pivotk/ratchet.hpp"
#include "pivotk/sweep.hpp"

#include <cmath>

namespace pivotk {

using nlohmann::json;
using fmt::shortest;

OutputFormat parse_output_format(const std::string& text) {
  if (text == "table") return OutputFormat::table;
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw ValidationError("unknown format '" + text + "'; expected table, csv or json");
}

SweepKind parse_sweep_kind(const std::string& text) {
  if (text == "sawtooth") return SweepKind::sawtooth;
  if (text == "ratchet") return SweepKind::ratchet;
  if (text == "race") return SweepKind::race;
  throw ValidationError("unknown sweep kind '" + text + "'; expected sawtooth, ratchet or race");
}

std::string Report::render(OutputFormat format) const {
  switch (format) {
    case OutputFormat::table: return display.render();
    case OutputFormat::csv: return csv.render_csv();
    case OutputFormat::json: return json.dump(2) + "\n";
  }
  return {};
}

namespace {

struct Point {
  SystemInstance instance;
  double q0 = 0.0;
  double q_rat = 0.0;
  double q_micro = 0.0;
  double b_static = 0.0;
  double b_ratchet = 0.0;
};

Point evaluate(const AnalysisConfig& c, const SystemInstance& instance) {
  if (!(c.beta > 0.0)) throw ValidationError("config.beta: the bounty proxies need beta > 0");
  Point p{instance};
  p.q0 = exact_q0(instance, c.beta);
  // Static sender: the first slot's recovery slack is the instance slack.
  p.q_rat = q_rat_first_slot(ContactSchedule::uniform(instance.m(), instance.kappa()), instance.n(), c.beta).value;
  p.q_micro = q_micro(instance, c.beta).value;
  const auto proxies = bounty_proxies(c.beta, c.econ_params(), p.q0, p.q_rat);
  p.b_static = proxies.static_proxy;
  p.b_ratchet = proxies.ratchet_proxy;
  return p;
}

json envelope(const AnalysisConfig& c, const std::string& command) {
  return {{"command", command}, {"seed", c.seed}, {"config", to_json(c)}};
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

Report table_main(const AnalysisConfig& c) {
  Report r;
  r.display.header = {"kappa", "t*", "Delta", "q0", "q_rat", "q_micro", "B_static", "B_static_usd"};
  r.csv.header = {"kappa", "t_star", "delta", "q0", "q_rat", "q_micro", "b_static", "b_static_usd"};
  r.json = envelope(c, "table-main");
  json rows = json::array();
  for (const auto& inst : c.instances()) {
    const Point p = evaluate(c, inst);
    // USD is quoted from the printed bounty, so the two columns agree.
    const double usd = fmt::displayed_bounty(p.b_static) * c.usd_per_unit;
    r.display.rows.push_back({std::to_string(inst.kappa()), std::to_string(inst.t_star()),
                              std::to_string(inst.slack()), fmt::probability(p.q0), fmt::probability(p.q_rat),
                              fmt::probability(p.q_micro), fmt::bounty_units(p.b_static), fmt::usd_cents(usd)});
    r.csv.rows.push_back({std::to_string(inst.kappa()), std::to_string(inst.t_star()), std::to_string(inst.slack()),
                          shortest(p.q0), shortest(p.q_rat), shortest(p.q_micro), shortest(p.b_static),
                          shortest(p.b_static * c.usd_per_unit)});
    rows.push_back({{"kappa", inst.kappa()},
                    {"t_star", inst.t_star()},
                    {"delta", inst.slack()},
                    {"q0", p.q0},
                    {"q_rat", p.q_rat},
                    {"q_micro", p.q_micro},
                    {"b_static", p.b_static},
                    {"b_static_usd", p.b_static * c.usd_per_unit},
                    {"display", r.display.rows.back()}});
  }
  r.json["rows"] = rows;
  return r;
}

Report table_coalition(const AnalysisConfig& c) {
  Report r;
  r.display.header = {"kappa", "Delta", "unilateral_safe", "equal_share", "B_coal", "B_static"};
  r.csv.header = {"kappa", "delta", "unilateral_safe", "equal_share", "b_coal", "b_static"};
  r.json = envelope(c, "table-coalition");
  const EconParams econ = c.econ_params();
  json rows = json::array();
  for (const auto& inst : c.instances()) {
    const Point p = evaluate(c, inst);
    const double share = equal_share(econ, inst);
    const auto coal = coalition_sufficient_bounty(inst, econ);
    const bool safe = !inst.knife_edge();
    r.display.rows.push_back({std::to_string(inst.kappa()), std::to_string(inst.slack()), yes_no(safe),
                              fmt::fixed(share, 1), coal ? fmt::grouped(*coal) : "n/a",
                              fmt::bounty_units(p.b_static)});
    r.csv.rows.push_back({std::to_string(inst.kappa()), std::to_string(inst.slack()), yes_no(safe), shortest(share),
                          coal ? shortest(*coal) : "n/a", shortest(p.b_static)});
    rows.push_back({{"kappa", inst.kappa()},
                    {"delta", inst.slack()},
                    {"unilateral_safe", safe},
                    {"equal_share", share},
                    {"b_coal", coal ? json(*coal) : json(nullptr)},
                    {"b_static", p.b_static},
                    {"display", r.display.rows.back()}});
  }
  r.json["rows"] = rows;
  return r;
}

Report table_cost(const AnalysisConfig& c) {
  Report r;
  r.display.header = {"tier", "alpha_v", "B_static", "B_ratchet", "B_ratchet/alpha_v"};
  r.csv.header = {"tier", "alpha_v_usd", "b_static_usd", "b_ratchet_usd", "ratio"};
  r.json = envelope(c, "table-cost");
  const auto inst = c.instance_for_kappa(c.operating_kappa);
  const Point p = evaluate(c, inst);
  // Tiers are priced from the printed probabilities (0.136, 8.0e-5).
  const double q0_shown = fmt::displayed_probability(p.q0);
  const double qr_shown = fmt::displayed_probability(p.q_rat);
  json rows = json::array();
  for (const auto& tier : c.mev_tiers) {
    const double scale = tier.alpha_v_usd / c.beta;
    const double b_static = scale * q0_shown;
    const double b_ratchet = scale * qr_shown;
    const double ratio = qr_shown / c.beta;
    r.display.rows.push_back({tier.name, fmt::usd_tier(tier.alpha_v_usd), fmt::usd_scaled(b_static),
                              fmt::usd_scaled(b_ratchet), fmt::percent(ratio)});
    r.csv.rows.push_back({tier.name, shortest(tier.alpha_v_usd), shortest(tier.alpha_v_usd / c.beta * p.q0),
                          shortest(tier.alpha_v_usd / c.beta * p.q_rat), shortest(p.q_rat / c.beta)});
    rows.push_back({{"tier", tier.name},
                    {"alpha_v_usd", tier.alpha_v_usd},
                    {"b_static_usd", tier.alpha_v_usd / c.beta * p.q0},
                    {"b_ratchet_usd", tier.alpha_v_usd / c.beta * p.q_rat},
                    {"ratio", p.q_rat / c.beta},
                    {"display", r.display.rows.back()}});
  }
  r.json["operating_point"] = {{"kappa", inst.kappa()}, {"t_star", inst.t_star()}, {"delta", inst.slack()},
                               {"q0", p.q0},          {"q_rat", p.q_rat}};
  r.json["rows"] = rows;
  return r;
}

Report sweep_report(const AnalysisConfig& c, SweepKind kind) {
  Report r;
  std::vector<std::uint32_t> kappas;
  for (std::uint32_t k = c.sweep_first; k <= c.sweep_last; ++k) kappas.push_back(k);
  json rows = json::array();
  switch (kind) {
    case SweepKind::sawtooth: {
      r.json = envelope(c, "sweep");
      r.display.header = {"kappa", "t*", "Delta", "q0", "q_rat", "q_micro", "knife_edge"};
      r.csv.header = {"kappa", "t_star", "delta", "q0", "q_rat", "q_micro", "knife_edge"};
      for (const auto& row : sawtooth_sweep(c.n, c.m, c.beta, c.sweep_first, c.sweep_last)) {
        r.display.rows.push_back({std::to_string(row.kappa), std::to_string(row.t_star), std::to_string(row.delta),
                                  fmt::probability(row.q0), fmt::probability(row.q_rat),
                                  fmt::probability(row.q_micro), yes_no(row.knife_edge)});
        r.csv.rows.push_back({std::to_string(row.kappa), std::to_string(row.t_star), std::to_string(row.delta),
                              shortest(row.q0), shortest(row.q_rat), shortest(row.q_micro),
                              row.knife_edge ? "1" : "0"});
        rows.push_back({{"kappa", row.kappa},
                        {"t_star", row.t_star},
                        {"delta", row.delta},
                        {"q0", row.q0},
                        {"q_rat", row.q_rat},
                        {"q_micro", row.q_micro},
                        {"knife_edge", row.knife_edge}});
      }
      break;
    }
    case SweepKind::ratchet: {
      r.json = envelope(c, "sweep-ratchet");
      r.display.header = {"kappa", "q0", "q_rat", "q_rat_multi_mc", "ci_low", "ci_high", "epsilon", "worst_spread"};
      r.csv.header = {"kappa", "q0", "q_rat", "q_rat_multi_mc", "ci_low", "ci_high", "epsilon"};
      for (const auto& row : ratchet_sweep(c.n, c.m, c.beta, kappas, c.sweep_trials, c.seed, c.epsilon)) {
        auto mc = [&](double v) { return row.has_multi ? shortest(v) : std::string(); };
        r.display.rows.push_back({std::to_string(row.kappa), fmt::probability(row.q0), fmt::probability(row.q_rat),
                                  row.has_multi ? fmt::probability(row.q_rat_multi_mc) : "",
                                  row.has_multi ? fmt::probability(row.ci_low) : "",
                                  row.has_multi ? fmt::probability(row.ci_high) : "", shortest(row.epsilon),
                                  row.worst_spread});
        r.csv.rows.push_back({std::to_string(row.kappa), shortest(row.q0), shortest(row.q_rat),
                              mc(row.q_rat_multi_mc), mc(row.ci_low), mc(row.ci_high), shortest(row.epsilon)});
        json jr = {{"kappa", row.kappa}, {"q0", row.q0}, {"q_rat", row.q_rat}, {"epsilon", row.epsilon}};
        if (row.has_multi) {
          jr["q_rat_multi_mc"] = row.q_rat_multi_mc;
          jr["ci_low"] = row.ci_low;
          jr["ci_high"] = row.ci_high;
          jr["worst_spread"] = row.worst_spread;
        }
        rows.push_back(jr);
      }
      r.json["trials_per_spread"] = c.sweep_trials;
      break;
    }
    case SweepKind::race: {
      r.json = envelope(c, "sweep-race");
      const auto race = c.race.build();
      const auto bar = rho_bar(race, c.m);
      r.display.header = {"kappa", "r", "q_micro", "g_inc_upper", "g_inc_floor"};
      r.csv.header = r.display.header;
      for (const auto& row : race_sweep(c.n, c.m, c.beta, kappas, race, c.econ.gamma)) {
        r.display.rows.push_back({std::to_string(row.kappa), std::to_string(row.r), fmt::probability(row.q_micro),
                                  fmt::probability(row.g_inc_upper), fmt::probability(row.g_inc_floor)});
        r.csv.rows.push_back({std::to_string(row.kappa), std::to_string(row.r), shortest(row.q_micro),
                              shortest(row.g_inc_upper), shortest(row.g_inc_floor)});
        rows.push_back({{"kappa", row.kappa},
                        {"r", row.r},
                        {"q_micro", row.q_micro},
                        {"g_inc_upper", row.g_inc_upper},
                        {"g_inc_floor", row.g_inc_floor}});
      }
      r.json["race"] = {{"p", race.p()}, {"rho_bar", bar.value}, {"rho_bar_grid_only", bar.grid_only}};
      break;
    }
  }
  r.json["rows"] = rows;
  return r;
}

Report advise_report(const AnalysisConfig& c, std::optional<std::uint32_t> kappa) {
  const auto inst = c.instance_for_kappa(kappa.value_or(c.operating_kappa));
  const EconParams econ = c.econ_params();
  const Point p = evaluate(c, inst);
  Report r;
  r.display.header = {"item", "value"};
  r.csv.header = {"item", "value"};
  r.json = envelope(c, "advise");
  auto add = [&](const std::string& item, const std::string& shown, const json& raw) {
    r.display.rows.push_back({item, shown});
    r.csv.rows.push_back({item, raw.is_string() ? raw.get<std::string>() : raw.dump()});
    r.json["items"][item] = raw;
  };
  add("kappa", std::to_string(inst.kappa()), inst.kappa());
  add("t_star", std::to_string(inst.t_star()), inst.t_star());
  add("delta", std::to_string(inst.slack()), inst.slack());
  add("q0", fmt::probability(p.q0), p.q0);
  add("q_rat", fmt::probability(p.q_rat), p.q_rat);
  add("q_micro", fmt::probability(p.q_micro), p.q_micro);

  if (inst.knife_edge()) {
    add("verdict", "avoid: knife edge (m divides kappa)", "avoid: knife edge");
    const auto th = knife_edge_bounty_threshold(inst, c.beta, econ, p.q0);
    add("knife_edge_bounty", fmt::grouped(th.threshold) + " (" + fmt::usd_scaled(th.threshold * c.usd_per_unit) + ")",
        th.threshold);
  } else {
    add("verdict", "ok: positive slack", "ok: positive slack");
    const auto coal = coalition_sufficient_bounty(inst, econ);
    add("coalition_bounty", fmt::grouped(*coal) + " (" + fmt::usd_scaled(*coal * c.usd_per_unit) + ")", *coal);
  }
  add("unilateral_safe", yes_no(!inst.knife_edge()), !inst.knife_edge());

  if (econ.bundle_fee() > 0.0 && c.beta > 0.0) {
    const auto phi = phi_threshold(inst, c.beta, econ, p.q0);
    add("phi_star", fmt::fixed(phi.value, 3) + (phi.feasible ? "" : " (fees alone infeasible)"), phi.value);
    if (!phi.feasible) add("fees_alone", "infeasible: phi* > 1", "infeasible");
  }

  add("b_static", fmt::bounty_units(p.b_static) + " (" + fmt::usd_scaled(p.b_static * c.usd_per_unit) + ")",
      p.b_static);
  add("b_ratchet", fmt::bounty_units(p.b_ratchet) + " (" + fmt::usd_scaled(p.b_ratchet * c.usd_per_unit) + ")",
      p.b_ratchet);

  const auto t0 = distribution_of_T0(inst, c.beta, default_T0_cap(inst));
  const double ir = sender_ir_bound(inst, econ, p.q0, t0.expected_discount(econ.gamma()));
  add("ir_ceiling", fmt::bounty_units(ir) + " (" + fmt::usd_scaled(ir * c.usd_per_unit) + ")", ir);

  std::string rec;
  if (inst.knife_edge()) {
    rec = "move kappa off a multiple of m to restore slack";
  } else if (inst.t_star() >= 2) {
    rec = "use the ratchet and post B_ratchet = " + fmt::bounty_units(p.b_ratchet) + " (q_rat = " +
          fmt::probability(p.q_rat) + ")";
  } else {
    rec = "t* = 1: the ratchet cannot help; keep kappa < m with positive slack and post B_static = " +
          fmt::bounty_units(p.b_static);
  }
  add("recommendation", rec, rec);
  return r;
}

}  // namespace pivotk
