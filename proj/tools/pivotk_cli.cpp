// pivotk: tables, sweeps, property checks and simulation for PIVOT-K.
//
// Exit codes: 0 success, 1 validation error, 2 property failure.

#include "pivotk/config.hpp"
#include "pivotk/delay.hpp"
#include "pivotk/error.hpp"
#include "pivotk/io.hpp"
#include "pivotk/probability.hpp"
#include "pivotk/reports.hpp"
#include "pivotk/rng.hpp"
#include "pivotk/simulator.hpp"
#include "pivotk/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kPropertyFailure = 2;

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string format = "table";
};

pivotk::AnalysisConfig load(const Globals& g) {
  pivotk::AnalysisConfig config = g.config_path.empty() ? pivotk::AnalysisConfig{} : pivotk::load_config(g.config_path);
  if (g.seed) config.seed = *g.seed;
  config.validate();
  return config;
}

int print(const pivotk::Report& report, const Globals& g) {
  std::cout << report.render(pivotk::parse_output_format(g.format));
  return kOk;
}

int run_verify(const Globals& g, bool inject_fault, std::uint64_t mc_trials) {
  const auto config = load(g);
  pivotk::VerifyOptions options;
  options.inject_minimax_fault = inject_fault;
  options.mc_trials = mc_trials;
  const auto report = pivotk::run_verify(config, options);
  switch (pivotk::parse_output_format(g.format)) {
    case pivotk::OutputFormat::json: std::cout << report.to_json().dump(2) << '\n'; break;
    case pivotk::OutputFormat::csv:
      std::cout << "suite,passed,checks,failures\n";
      for (const auto& s : report.suites) {
        std::cout << s.name << ',' << (s.passed() ? 1 : 0) << ',' << s.checks << ',' << s.failures << '\n';
      }
      break;
    case pivotk::OutputFormat::table:
      std::cout << "seed " << report.seed << '\n';
      for (const auto& s : report.suites) {
        std::cout << (s.passed() ? "PASS " : "FAIL ") << s.name << " (" << s.checks << " checks, " << s.failures
                  << " failures)\n";
        for (const auto& d : s.details) std::cout << "    " << d << '\n';
      }
      std::cout << (report.passed() ? "all suites passed" : "property failures detected") << '\n';
      break;
  }
  return report.passed() ? kOk : kPropertyFailure;
}

int run_simulate(const Globals& g, std::optional<std::uint32_t> kappa, const std::string& policy_spec,
                 std::optional<std::uint64_t> trials_opt, const std::string& mode_text, const std::string& traces_path,
                 std::uint64_t keep) {
  const auto config = load(g);
  const auto instance = config.instance_for_kappa(kappa.value_or(config.operating_kappa));
  const auto policy = pivotk::parse_policy(policy_spec);
  const auto mode = pivotk::parse_mechanism_mode(mode_text);
  const auto econ = config.econ_params();
  const std::uint64_t trials = trials_opt.value_or(config.trials);
  if (trials == 0) throw pivotk::ValidationError("--trials must be positive");

  std::vector<pivotk::TraceRecord> kept;
  pivotk::CompensatedSum fee, bounty, mev, total;
  std::uint64_t delayed = 0;
  std::uint64_t truncated = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    auto trace = pivotk::run_trace(instance, config.beta, policy, pivotk::derive_seed(config.seed, i));
    const auto payoff = pivotk::payoff_of_trace(trace, econ, mode);
    fee.add(payoff.fee_revenue);
    bounty.add(payoff.bounty_revenue);
    mev.add(payoff.mev_option);
    total.add(payoff.total);
    delayed += trace.delayed;
    truncated += trace.truncated;
    if (!traces_path.empty() && kept.size() < keep) kept.push_back({std::move(trace), econ, mode, payoff});
  }
  if (!traces_path.empty()) {
    std::ofstream out(traces_path);
    if (!out) throw pivotk::ValidationError("cannot write traces to '" + traces_path + "'");
    pivotk::write_jsonl(out, kept);
  }

  const auto est = pivotk::McEstimate::from_counts(delayed, trials);
  const double n = static_cast<double>(trials);
  pivotk::Report r;
  r.display.header = {"item", "value"};
  r.csv.header = r.display.header;
  r.json = {{"command", "simulate"}, {"seed", config.seed}, {"config", pivotk::to_json(config)}};
  auto add = [&](const std::string& item, const nlohmann::json& value) {
    const std::string shown = value.is_string() ? value.get<std::string>() : value.dump();
    r.display.rows.push_back({item, shown});
    r.csv.rows.push_back({item, shown});
    r.json["results"][item] = value;
  };
  add("kappa", instance.kappa());
  add("policy", pivotk::policy_name(policy));
  add("mode", std::string(pivotk::to_string(mode)));
  add("trials", trials);
  add("delay_frequency", est.frequency);
  add("stderr", est.stderr_);
  add("ci_low", est.ci_low);
  add("ci_high", est.ci_high);
  add("exact_q0_full_withhold", pivotk::exact_q0(instance, config.beta));
  add("truncated_traces", truncated);
  add("mean_fee_revenue", fee.value() / n);
  add("mean_bounty_revenue", bounty.value() / n);
  add("mean_mev_option", mev.value() / n);
  add("mean_total", total.value() / n);
  if (!traces_path.empty()) add("traces_written", kept.size());
  return print(r, g);
}

int run_replay(const Globals& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pivotk::ValidationError("cannot open trace file '" + path + "'");
  const auto records = pivotk::read_jsonl(in);
  const auto result = pivotk::replay(records);
  if (g.format == "json") {
    std::cout << nlohmann::json{{"records", result.records},
                                {"payoff_mismatches", result.payoff_mismatches},
                                {"trace_mismatches", result.trace_mismatches},
                                {"messages", result.messages},
                                {"passed", result.passed()}}
                     .dump(2)
              << '\n';
  } else {
    std::cout << "records " << result.records << "\npayoff_mismatches " << result.payoff_mismatches
              << "\ntrace_mismatches " << result.trace_mismatches << '\n';
    for (const auto& m : result.messages) std::cout << "  " << m << '\n';
    std::cout << (result.passed() ? "replay matches" : "replay mismatch") << '\n';
  }
  return result.passed() ? kOk : kPropertyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PIVOT-K analysis: delay probabilities, bounty thresholds, ratchet and race bounds"};
  app.require_subcommand(1);
  Globals g;
  auto add_globals = [&](CLI::App* cmd) {
    cmd->add_option("--config", g.config_path, "JSON analysis config (defaults reproduce the reference tables)");
    cmd->add_option("--seed", g.seed, "master seed for Monte-Carlo streams");
    cmd->add_option("--format", g.format, "output format")->check(CLI::IsMember({"table", "csv", "json"}));
  };

  std::function<int()> action;

  auto* main_cmd = app.add_subcommand("table-main", "exact delay, ratchet and within-slot table");
  add_globals(main_cmd);
  main_cmd->callback([&] { action = [&] { return print(pivotk::table_main(load(g)), g); }; });

  auto* coal_cmd = app.add_subcommand("table-coalition", "coalition decomposition table");
  add_globals(coal_cmd);
  coal_cmd->callback([&] { action = [&] { return print(pivotk::table_coalition(load(g)), g); }; });

  auto* cost_cmd = app.add_subcommand("table-cost", "sender bounty cost per MEV tier");
  add_globals(cost_cmd);
  cost_cmd->callback([&] { action = [&] { return print(pivotk::table_cost(load(g)), g); }; });

  std::string sweep_kind = "sawtooth";
  std::optional<std::uint32_t> sweep_first, sweep_last;
  auto* sweep_cmd = app.add_subcommand("sweep", "per-kappa data for plotting");
  add_globals(sweep_cmd);
  sweep_cmd->add_option("--kind", sweep_kind, "sawtooth, ratchet or race")
      ->check(CLI::IsMember({"sawtooth", "ratchet", "race"}));
  sweep_cmd->add_option("--first", sweep_first, "first kappa (overrides config)");
  sweep_cmd->add_option("--last", sweep_last, "last kappa (overrides config)");
  sweep_cmd->callback([&] {
    action = [&] {
      auto config = load(g);
      if (sweep_first) config.sweep_first = *sweep_first;
      if (sweep_last) config.sweep_last = *sweep_last;
      config.validate();
      return print(pivotk::sweep_report(config, pivotk::parse_sweep_kind(sweep_kind)), g);
    };
  });

  std::string inject;
  std::uint64_t mc_trials = 0;
  auto* verify_cmd = app.add_subcommand("verify", "run the property battery");
  add_globals(verify_cmd);
  verify_cmd->add_option("--inject-fault", inject, "deliberately break a suite (minimax)")
      ->check(CLI::IsMember({"minimax"}));
  verify_cmd->add_option("--mc-trials", mc_trials, "trials per row for MC/exact agreement");
  verify_cmd->callback([&] { action = [&] { return run_verify(g, inject == "minimax", mc_trials); }; });

  std::optional<std::uint32_t> advise_kappa;
  auto* advise_cmd = app.add_subcommand("advise", "recommendation for an operating point");
  add_globals(advise_cmd);
  advise_cmd->add_option("--kappa", advise_kappa, "decode threshold in bundles (default: operating_kappa)");
  advise_cmd->callback([&] { action = [&] { return print(pivotk::advise_report(load(g), advise_kappa), g); }; });

  std::optional<std::uint32_t> sim_kappa;
  std::string policy_spec = "full_withhold";
  std::optional<std::uint64_t> sim_trials;
  std::string mode = "pivot_k";
  std::string traces_path;
  std::uint64_t keep = 100;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo traces under an adversary policy");
  add_globals(sim_cmd);
  sim_cmd->add_option("--kappa", sim_kappa, "decode threshold in bundles (default: operating_kappa)");
  sim_cmd->add_option("--policy", policy_spec,
                      "full_include | full_withhold | w:<rate> | minimal_sabotage | spread:<caps> | scripted:<counts>");
  sim_cmd->add_option("--trials", sim_trials, "number of traces (default: mc.trials)");
  sim_cmd->add_option("--mode", mode, "pivot_k or fees_only")->check(CLI::IsMember({"pivot_k", "fees_only"}));
  sim_cmd->add_option("--traces", traces_path, "write traces as JSON lines to this file");
  sim_cmd->add_option("--keep", keep, "maximum number of traces to write");
  sim_cmd->callback([&] {
    action = [&] { return run_simulate(g, sim_kappa, policy_spec, sim_trials, mode, traces_path, keep); };
  });

  std::string replay_path;
  auto* replay_cmd = app.add_subcommand("replay", "recompute payoffs of stored traces");
  add_globals(replay_cmd);
  replay_cmd->add_option("traces", replay_path, "JSON-lines trace file")->required();
  replay_cmd->callback([&] { action = [&] { return run_replay(g, replay_path); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    return action();
  } catch (const pivotk::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const pivotk::PropertyViolation& e) {
    std::cerr << "property violation: " << e.what() << '\n';
    return kPropertyFailure;
  } catch (const pivotk::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
}
