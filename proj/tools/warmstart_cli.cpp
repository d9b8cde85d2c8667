// warmstart: simulate | learn | report | selftest
//
// Exit status: 0 success, 1 user error, 2 internal invariant violation.

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <warmstart/acceptance.hpp>
#include <warmstart/harness.hpp>

namespace {

using namespace warmstart;

struct RunFlags {
  std::string config;
  std::string scenario;
  std::string strategy;
  std::string metric;
  std::string learner;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
  std::optional<double> train_fraction;
  std::vector<std::string> params;
  std::vector<int> baseline_ks;
  std::string out;
  std::string save_scenario;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "JSON run config; flags below override it");
  cmd->add_option("--scenario", f.scenario, "generator name or scenario file");
  cmd->add_option("--k", f.k, "number of predictions / servers / partitions");
  cmd->add_option("--seed", f.seed, "generator seed");
  cmd->add_option("--metric", f.metric, "L1, L2 or Linf (generated scenarios)");
  cmd->add_option("--param", f.params, "generator parameter key=value (repeatable)");
  cmd->add_option("--train-fraction", f.train_fraction, "leading fraction of days used for training");
  cmd->add_option("--out", f.out, "output file (default: stdout)");
  cmd->add_option("--save-scenario", f.save_scenario, "also write the scenario file");
}

RunConfig build_config(const RunFlags& f) {
  RunConfig c;
  if (!f.config.empty()) c = parse_run_config(read_text_file(f.config));
  if (!f.scenario.empty()) apply_scenario_flag(c, f.scenario);
  if (!f.strategy.empty()) c.strategy = f.strategy;
  if (!f.learner.empty()) c.learner = f.learner;
  if (!f.metric.empty()) c.scenario.metric.norm = norm_from_string(f.metric);
  if (f.k) c.k = *f.k;
  if (f.seed) c.scenario.seed = *f.seed;
  if (f.train_fraction) c.train_fraction = *f.train_fraction;
  if (!f.baseline_ks.empty()) c.baseline_ks = f.baseline_ks;
  for (const auto& kv : f.params) {
    const auto eq = kv.find('=');
    require(eq != std::string::npos && eq > 0, "--param expects key=value, got '" + kv + "'");
    try {
      std::size_t used = 0;
      const std::string v = kv.substr(eq + 1);
      c.scenario.params[kv.substr(0, eq)] = std::stod(v, &used);
      require(used == v.size(), "trailing characters");
    } catch (const std::exception&) {
      throw UsageError("--param value is not a number: '" + kv + "'");
    }
  }
  if (!f.out.empty()) c.out = f.out;
  c.validate();
  return c;
}

void maybe_save_scenario(const RunFlags& f, const RunConfig& c) {
  if (!f.save_scenario.empty()) write_text_file(f.save_scenario, serialize_scenario(load_scenario(c.scenario)));
}

int run_selftest(const std::vector<int>& only) {
  bool all = true;
  for (const auto& c : acceptance::criteria(nullptr)) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto r = acceptance::run_criterion(c);
    std::cout << acceptance::format_line(r) << "\n" << std::flush;
    all = all && r.pass;
  }
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Warm-start search strategies: simulation, learning and reporting"};
  app.require_subcommand(1);

  RunFlags sim, learn;
  auto* simulate = app.add_subcommand("simulate", "run a strategy over a scenario and write its cost ledger");
  add_run_flags(simulate, sim);
  simulate->add_option("--strategy", sim.strategy, "strategy name");
  simulate->add_option("--baseline-k", sim.baseline_ks, "k values for the per-k baselines");

  auto* learner = app.add_subcommand("learn", "learn centers or a partition on a train split, evaluate on holdout");
  add_run_flags(learner, learn);
  learner->add_option("--learner", learn.learner, "kmedians or partition");

  std::vector<std::string> ledgers;
  std::string csv_out, json_out;
  auto* report = app.add_subcommand("report", "join ledgers into a comparison table");
  report->add_option("ledgers", ledgers, "ledger files")->required();
  report->add_option("--out", csv_out, "CSV output (default: stdout)");
  report->add_option("--json", json_out, "structured output");

  std::vector<int> only;
  auto* selftest = app.add_subcommand("selftest", "run the acceptance criteria");
  selftest->add_option("--only", only, "criterion ids to run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*simulate) {
      const RunConfig c = build_config(sim);
      maybe_save_scenario(sim, c);
      const auto r = cmd_simulate(c);
      if (!c.out) std::cout << r.text;
    } else if (*learner) {
      const RunConfig c = build_config(learn);
      maybe_save_scenario(learn, c);
      const auto text = cmd_learn(c);
      if (!c.out) std::cout << text;
    } else if (*report) {
      std::vector<CostLedger> ls;
      for (const auto& p : ledgers) ls.push_back(parse_ledger(read_text_file(p)));
      const auto r = cmd_report(ls);
      if (csv_out.empty())
        std::cout << r.csv;
      else
        write_text_file(csv_out, r.csv);
      if (!json_out.empty()) write_text_file(json_out, r.json);
    } else if (*selftest) {
      return run_selftest(only);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
