#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "warmstart/baselines.hpp"
#include "warmstart/errors.hpp"
#include "warmstart/kmedians.hpp"
#include "warmstart/ledger.hpp"
#include "warmstart/partition.hpp"
#include "warmstart/scenario.hpp"
#include "warmstart/strategies.hpp"

namespace warmstart {

inline const std::vector<std::string>& strategy_names() {
  static const std::vector<std::string> names{"predict-yesterday", "quadratic-decay", "harmonic-decay",
                                              "kserver-greedy",    "kserver-wfa",     "parallel-k",
                                              "partition"};
  return names;
}

/// Where the scenario comes from: a file, or a generator with parameters.
struct ScenarioSource {
  std::optional<std::string> file;
  std::string generator = "drifting_trajectories";
  std::uint64_t seed = 1;
  Metric metric;
  std::map<std::string, double> params;
};

struct RunConfig {
  ScenarioSource scenario;
  std::string strategy = "quadratic-decay";
  int k = 2;
  std::vector<int> baseline_ks{1, 2, 3};
  double train_fraction = 0.5;  // parallel-k / partition / learn: leading fraction used for training
  std::string learner = "kmedians";
  int max_depth = 2;
  std::optional<std::string> out;
  std::optional<std::string> csv_out;

  void validate() const {
    if (!scenario.file) {
      bool known = false;
      for (const auto& g : generator_names()) known = known || g == scenario.generator;
      require(known, "unknown generator '" + scenario.generator + "'");
    }
    bool known = false;
    for (const auto& s : strategy_names()) known = known || s == strategy;
    require(known, "unknown strategy '" + strategy + "'");
    require(k >= 1 && k <= 64, "k must be in [1, 64]");
    if (strategy == "kserver-wfa") require(k <= WorkFunctionState::kMaxServers, "kserver-wfa supports k <= 3");
    if (strategy == "partition") require(k <= kMaxRotationK, "partition supports k <= 4");
    for (int b : baseline_ks) require(b >= 1 && b <= 64, "baseline k must be in [1, 64]");
    require(train_fraction > 0.0 && train_fraction < 1.0, "train_fraction must be in (0, 1)");
    require(learner == "kmedians" || learner == "partition", "learner must be kmedians or partition");
    require(max_depth >= 0 && max_depth <= 2, "max_depth must be 0, 1 or 2");
  }
};

// ---------------------------------------------------------------------------
// Config and file helpers

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
  if (!out) throw UsageError("write to '" + path + "' failed");
}

/// Reads a run config. Unknown keys are errors.
///
///   {"scenario": {"generator": "...", "seed": 7, "metric": "L2", "params": {...}}
///              | {"file": "scenario.json"},
///    "strategy": "quadratic-decay", "k": 2, "baseline_ks": [1, 2, 3],
///    "train_fraction": 0.5, "learner": "kmedians", "max_depth": 2,
///    "out": "ledger.json", "csv_out": "report.csv"}
inline RunConfig parse_run_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  require(j.is_object(), "config must be a JSON object");
  static const std::set<std::string> keys{"scenario", "strategy",  "k",   "baseline_ks", "train_fraction",
                                          "learner",  "max_depth", "out", "csv_out"};
  for (const auto& [key, _] : j.items()) require(keys.count(key) > 0, "unknown config key '" + key + "'");
  RunConfig c;
  try {
    if (j.contains("scenario")) {
      const auto& s = j.at("scenario");
      require(s.is_object(), "config 'scenario' must be an object");
      static const std::set<std::string> skeys{"file", "generator", "seed", "metric", "params"};
      for (const auto& [key, _] : s.items())
        require(skeys.count(key) > 0, "unknown scenario key '" + key + "'");
      if (s.contains("file")) c.scenario.file = s.at("file").get<std::string>();
      if (s.contains("generator")) c.scenario.generator = s.at("generator").get<std::string>();
      if (s.contains("seed")) c.scenario.seed = s.at("seed").get<std::uint64_t>();
      if (s.contains("metric")) c.scenario.metric.norm = norm_from_string(s.at("metric").get<std::string>());
      if (s.contains("params")) c.scenario.params = s.at("params").get<std::map<std::string, double>>();
    }
    if (j.contains("strategy")) c.strategy = j.at("strategy").get<std::string>();
    if (j.contains("k")) c.k = j.at("k").get<int>();
    if (j.contains("baseline_ks")) c.baseline_ks = j.at("baseline_ks").get<std::vector<int>>();
    if (j.contains("train_fraction")) c.train_fraction = j.at("train_fraction").get<double>();
    if (j.contains("learner")) c.learner = j.at("learner").get<std::string>();
    if (j.contains("max_depth")) c.max_depth = j.at("max_depth").get<int>();
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("csv_out")) c.csv_out = j.at("csv_out").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed config: ") + e.what());
  }
  return c;
}

/// --scenario accepts a generator name or a scenario file path.
inline void apply_scenario_flag(RunConfig& c, const std::string& value) {
  for (const auto& g : generator_names()) {
    if (g == value) {
      c.scenario.file.reset();
      c.scenario.generator = value;
      return;
    }
  }
  c.scenario.file = value;
}

inline Scenario load_scenario(const ScenarioSource& src) {
  if (src.file) return parse_scenario(read_text_file(*src.file));
  return generate(src.generator, src.seed, src.params, src.metric);
}

inline std::string scenario_key(const Scenario& s) { return s.name + "@" + std::to_string(s.seed); }

// Full-precision decimal, shortest form that round-trips.
inline std::string format_real(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

// ---------------------------------------------------------------------------
// Baselines

inline constexpr std::size_t kKServerBaselineCap = 500;

/// Baselines over `solutions`. Ones over their size cap are recorded as
/// nullopt ("unavailable").
inline std::map<std::string, std::optional<double>> compute_baselines(std::span<const Point> solutions,
                                                                       const std::vector<int>& ks, Metric m,
                                                                       const std::optional<TrajectorySet>& planted) {
  std::map<std::string, std::optional<double>> out;
  const std::size_t T = solutions.size();
  out["opt_1_traj"] = trajectory_bruteforce_allowed(T, 1)
                          ? std::optional<double>(brute_force_best_trajectories(solutions, 1, m).cost)
                          : std::nullopt;
  for (int k : ks) {
    const std::string tag = "/k=" + std::to_string(k);
    out["opt_k_traj_restricted" + tag] =
        trajectory_bruteforce_allowed(T, k) ? std::optional<double>(brute_force_best_trajectories(solutions, k, m).cost)
                                            : std::nullopt;
    out["opt_kserver" + tag] =
        T <= kKServerBaselineCap ? std::optional<double>(offline_opt_kserver(solutions, k, m)) : std::nullopt;
  }
  if (planted) out["planted"] = trajectory_cost(*planted, solutions, m).total;
  return out;
}

/// Planted trajectory set restricted to days [from, T); every trajectory
/// restarts at the origin.
inline std::optional<TrajectorySet> planted_suffix(const std::optional<TrajectorySet>& ts, std::size_t from) {
  if (!ts) return std::nullopt;
  TrajectorySet out;
  out.k = ts->k;
  out.assignment.assign(ts->assignment.begin() + static_cast<std::ptrdiff_t>(from), ts->assignment.end());
  out.predictions.assign(ts->predictions.begin() + static_cast<std::ptrdiff_t>(from), ts->predictions.end());
  return out;
}

inline std::vector<LabeledSample> labeled(std::span<const HiddenInstance> days) {
  std::vector<LabeledSample> out;
  for (const auto& d : days) out.push_back(LabeledSample{d.features(), Hindsight::solution(d)});
  return out;
}

inline std::size_t train_split(std::size_t T, double fraction) {
  const auto n = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(T)));
  require(n >= 1 && n < T, "train/holdout split leaves an empty side (T = " + std::to_string(T) + ")");
  return n;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOutput {
  CostLedger ledger;
  std::string text;  // serialized ledger
};

inline SimulateOutput cmd_simulate(const RunConfig& cfg) {
  cfg.validate();
  const Scenario s = load_scenario(cfg.scenario);
  const Metric m = s.metric;
  std::span<const HiddenInstance> all(s.days);

  CostLedger ledger;
  std::size_t eval_from = 0;
  const std::string& st = cfg.strategy;
  if (st == "predict-yesterday") {
    ledger = predict_yesterday(all);
  } else if (st == "quadratic-decay") {
    ledger = run_quadratic_decay(all, DecayMode::Quadratic);
  } else if (st == "harmonic-decay") {
    ledger = run_quadratic_decay(all, DecayMode::Harmonic);
  } else if (st == "kserver-greedy" || st == "kserver-wfa") {
    ledger = kserver_reduction(all, st == "kserver-greedy" ? ServerAlgorithm::Greedy : ServerAlgorithm::WorkFunction,
                               cfg.k);
  } else if (st == "parallel-k") {
    eval_from = train_split(s.size(), cfg.train_fraction);
    const auto train = Hindsight::solutions(all.first(eval_from));
    require(static_cast<std::size_t>(cfg.k) <= train.size(), "parallel-k: k exceeds the training set size");
    const auto learned = learn_centers(train, static_cast<std::size_t>(cfg.k), m);
    ledger.strategy = st;
    for (const auto& inst : all.subspan(eval_from)) {
      const auto r = solve_with_learned_centers(inst, learned.centers);
      DayLedger d;
      d.day = inst.day();
      d.radius_searched = r.total_radius;
      d.virtual_radius = r.sweeps;
      d.solver = static_cast<long long>(r.winner);
      double nearest = distance(learned.centers.centers.front(), r.solution, m);
      for (const auto& c : learned.centers.centers) nearest = std::min(nearest, distance(c, r.solution, m));
      d.nearest_distance = nearest;
      ledger.days.push_back(d);
    }
    ledger.measured["train_cost"] = learned.cost;
  } else {  // partition
    eval_from = train_split(s.size(), cfg.train_fraction);
    const auto train = labeled(all.first(eval_from));
    const auto cls = enumerate_threshold_trees(train, cfg.k, cfg.max_depth);
    const auto two = two_step_learn(cls, train, cfg.k, m);
    ledger.strategy = st;
    for (const auto& inst : all.subspan(eval_from)) {
      const auto r = predict_and_solve(two.hypothesis, two.rotation, two.partition_centers, inst);
      DayLedger d;
      d.day = inst.day();
      d.radius_searched = r.radius;
      d.overhead_work = r.total_cost - r.radius;
      d.virtual_radius = r.radius;
      d.solver = r.label;
      d.nearest_distance = distance(two.partition_centers.centers[static_cast<std::size_t>(r.label)], r.solution, m);
      ledger.days.push_back(d);
    }
    ledger.measured["train_cost"] = two.final_cost;
    ledger.measured["class_size"] = static_cast<double>(cls.size());
  }
  ledger.recompute_totals();

  ledger.scenario = scenario_key(s);
  ledger.params["generator"] = cfg.scenario.file ? "file" : cfg.scenario.generator;
  ledger.params["metric"] = std::string(to_string(m.norm));
  ledger.params["days"] = std::to_string(s.size());
  ledger.params["eval_from_day"] = std::to_string(eval_from + 1);
  if (st.rfind("kserver", 0) == 0 || st == "parallel-k" || st == "partition") ledger.params["k"] = std::to_string(cfg.k);
  if (st == "parallel-k" || st == "partition") ledger.params["train_fraction"] = format_real(cfg.train_fraction);

  const auto sols = Hindsight::solutions(all.subspan(eval_from));
  ledger.baselines = compute_baselines(sols, cfg.baseline_ks, m, planted_suffix(s.meta.planted, eval_from));
  if (st.rfind("kserver", 0) == 0) {
    const auto it = ledger.baselines.find("opt_kserver/k=" + std::to_string(cfg.k));
    const double opt = it != ledger.baselines.end() && it->second
                           ? *it->second
                           : (sols.size() <= kKServerBaselineCap ? offline_opt_kserver(sols, cfg.k, m) : -1.0);
    if (opt > 0.0) ledger.measured["alpha"] = ledger.measured["kserver_movement"] / opt;
  }

  SimulateOutput out{ledger, serialize_ledger(ledger)};
  if (cfg.out) write_text_file(*cfg.out, out.text);
  return out;
}

// ---------------------------------------------------------------------------
// learn

inline nlohmann::ordered_json points_json(const std::vector<Point>& ps) {
  auto a = nlohmann::ordered_json::array();
  for (const auto& p : ps) a.push_back(point_json(p));
  return a;
}

inline nlohmann::ordered_json hypothesis_json(const PartitionHypothesis& h) {
  nlohmann::ordered_json j;
  j["k"] = h.k;
  j["eval_work"] = h.eval_work;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : h.nodes) {
    nlohmann::ordered_json nj;
    nj["feature"] = n.feature;
    nj["threshold"] = n.threshold;
    nj["left"] = n.left;
    nj["right"] = n.right;
    nj["label"] = n.label;
    j["nodes"].push_back(std::move(nj));
  }
  return j;
}

/// Trains on the leading train_fraction of days and evaluates on the rest.
/// Returns the serialized artifact (also written to cfg.out when set).
inline std::string cmd_learn(const RunConfig& cfg) {
  cfg.validate();
  const Scenario s = load_scenario(cfg.scenario);
  const Metric m = s.metric;
  std::span<const HiddenInstance> all(s.days);
  const std::size_t split = train_split(s.size(), cfg.train_fraction);
  const auto train_days = all.first(split);
  const auto hold_days = all.subspan(split);

  nlohmann::ordered_json j;
  j["schema"] = "warmstart.learned";
  j["version"] = 1;
  j["scenario"] = scenario_key(s);
  j["learner"] = cfg.learner;
  j["k"] = cfg.k;
  j["train_days"] = split;
  j["holdout_days"] = hold_days.size();

  long long total_radius = 0;
  if (cfg.learner == "kmedians") {
    const auto train = Hindsight::solutions(train_days);
    require(static_cast<std::size_t>(cfg.k) <= train.size(), "learn: k exceeds the training set size");
    const auto learned = learn_centers(train, static_cast<std::size_t>(cfg.k), m);
    j["centers"] = points_json(learned.centers.centers);
    j["center_sample_indices"] = learned.indices;
    j["train_cost"] = learned.cost;
    j["holdout_cost"] = cost_of_centers(learned.centers, Hindsight::solutions(hold_days), m);
    for (const auto& inst : hold_days) total_radius += solve_with_learned_centers(inst, learned.centers).total_radius;
  } else {
    const auto train = labeled(train_days);
    const auto hold = labeled(hold_days);
    const auto cls = enumerate_threshold_trees(train, cfg.k, cfg.max_depth);
    const auto two = two_step_learn(cls, train, cfg.k, m);
    j["hypothesis"] = hypothesis_json(two.hypothesis);
    j["rotation"] = two.rotation.map;
    j["partition_centers"] = points_json(two.partition_centers.centers);
    j["learned_centers"] = points_json(two.learned_centers.centers);
    j["class_size"] = cls.size();
    j["step2_loss"] = two.step2_loss;
    j["train_cost"] = two.final_cost;
    j["holdout_cost"] = c_loss(rotated(two.hypothesis, two.rotation), two.partition_centers, hold, m);
    for (const auto& inst : hold_days)
      total_radius += predict_and_solve(two.hypothesis, two.rotation, two.partition_centers, inst).total_cost;
  }
  j["holdout_total_radius"] = total_radius;
  std::string text = j.dump(2) + "\n";
  if (cfg.out) write_text_file(*cfg.out, text);
  return text;
}

// ---------------------------------------------------------------------------
// report

struct Report {
  std::string csv;
  std::string json;
};

/// Joins ledgers by scenario (stable: scenario key, then input order) and
/// emits one row per ledger with every baseline and ratio seen in any
/// input. Columns: fixed fields, then baseline names sorted, each as
/// baseline:<name> and ratio:<name>. Missing cells are "NA".
inline Report cmd_report(const std::vector<CostLedger>& ledgers) {
  require(!ledgers.empty(), "report needs at least one ledger");
  std::set<std::string> names;
  for (const auto& l : ledgers)
    for (const auto& [n, _] : l.baselines) names.insert(n);
  std::vector<std::size_t> order(ledgers.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ledgers[a].scenario < ledgers[b].scenario; });

  std::ostringstream csv;
  csv << "scenario,strategy,k,days,total_radius,total_overhead,wall_estimate";
  for (const auto& n : names) csv << ",baseline:" << n << ",ratio:" << n;
  csv << "\n";
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t i : order) {
    const auto& l = ledgers[i];
    const auto ratios = l.ratios();
    const auto kit = l.params.find("k");
    const std::string k = kit == l.params.end() ? "NA" : kit->second;
    csv << l.scenario << "," << l.strategy << "," << k << "," << l.days.size() << "," << l.totals.radius << ","
        << l.totals.overhead << "," << l.totals.wall_estimate;
    nlohmann::ordered_json row;
    row["scenario"] = l.scenario;
    row["strategy"] = l.strategy;
    row["k"] = k;
    row["days"] = l.days.size();
    row["totals"] = {{"radius", l.totals.radius}, {"overhead", l.totals.overhead},
                     {"wall_estimate", l.totals.wall_estimate}};
    row["baselines"] = nlohmann::ordered_json::object();
    row["ratios"] = nlohmann::ordered_json::object();
    for (const auto& n : names) {
      const auto b = l.baselines.find(n);
      const auto r = ratios.find(n);
      const bool hb = b != l.baselines.end() && b->second;
      const bool hr = r != ratios.end() && r->second;
      csv << "," << (hb ? format_real(*b->second) : "NA") << "," << (hr ? format_real(*r->second) : "NA");
      row["baselines"][n] = hb ? nlohmann::ordered_json(*b->second) : nlohmann::ordered_json("NA");
      row["ratios"][n] = hr ? nlohmann::ordered_json(*r->second) : nlohmann::ordered_json("NA");
    }
    csv << "\n";
    rows.push_back(std::move(row));
  }
  nlohmann::ordered_json j;
  j["schema"] = "warmstart.report";
  j["version"] = 1;
  j["rows"] = std::move(rows);
  return Report{csv.str(), j.dump(2) + "\n"};
}

}  // namespace warmstart
