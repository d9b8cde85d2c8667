#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "warmstart/baselines.hpp"
#include "warmstart/harness.hpp"
#include "warmstart/kmedians.hpp"
#include "warmstart/partition.hpp"
#include "warmstart/rng.hpp"
#include "warmstart/scenario.hpp"
#include "warmstart/strategies.hpp"
#include "warmstart/testing/oracles.hpp"

namespace warmstart::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double limit_seconds = 0.0;
  std::map<std::string, double> measured;
};

// Tolerances and limits, pinned.
inline constexpr double kTol = 1e-9;
inline constexpr double kRadiusOverVirtualFactor = 2.0;
inline constexpr double kOverheadOverRadiusFactor = 8.0;
inline constexpr double kTheoremConstant = 1000.0;

namespace detail {

inline Metric random_metric(CounterRng& rng) {
  static constexpr Norm norms[] = {Norm::L1, Norm::L2, Norm::Linf};
  return Metric{norms[rng.below(3)]};
}

inline Point random_point(CounterRng& rng, std::size_t dim, double lo, double hi) {
  std::vector<double> x(dim);
  for (auto& v : x) v = rng.uniform(lo, hi);
  return Point(std::move(x));
}

inline std::vector<Point> random_points(CounterRng& rng, std::size_t n, std::size_t dim, double lo, double hi) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_point(rng, dim, lo, hi));
  return out;
}

inline std::vector<HiddenInstance> days_of(const std::vector<Point>& sols, Metric m) {
  std::vector<HiddenInstance> out;
  for (std::size_t t = 0; t < sols.size(); ++t) out.emplace_back(t + 1, Point::zeros(1), sols[t], m);
  return out;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::map<std::string, double> measured;

  void fail(const std::string& why) {
    if (pass) detail << why;
    pass = false;
  }
};

}  // namespace detail

// 1. Parallel-k bound.
inline void criterion_parallel_k(detail::Outcome& o) {
  CounterRng root(101);
  long long worst_slack = std::numeric_limits<long long>::max();
  for (int c = 0; c < 500; ++c) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(c));
    const Metric m = detail::random_metric(rng);
    const std::size_t k = 1 + rng.below(8), dim = 1 + rng.below(16);
    const auto preds = detail::random_points(rng, k, dim, -50.0, 50.0);
    const HiddenInstance inst(1, Point::zeros(1), detail::random_point(rng, dim, -50.0, 50.0), m);
    const auto r = run_parallel_k(inst, preds);
    long long best = std::numeric_limits<long long>::max();
    for (const auto& p : preds) best = std::min(best, search_steps(p, Hindsight::solution(inst), m));
    const long long bound = static_cast<long long>(k) * best + static_cast<long long>(k);
    worst_slack = std::min(worst_slack, bound - r.total_radius);
    if (r.total_radius > bound) o.fail("case " + std::to_string(c) + ": radius above k*steps+k");
    if (r.total_radius != testing::naive_parallel_radius(inst, preds))
      o.fail("case " + std::to_string(c) + ": disagrees with naive round robin");
  }
  o.detail << (o.pass ? "500 cases, min slack " + std::to_string(worst_slack) : "");
}

// 2. Subset ERM against naive enumeration and the 1-D grid optimum.
inline void criterion_subset_erm(detail::Outcome& o) {
  CounterRng root(202);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(c));
    const Metric m = detail::random_metric(rng);
    const std::size_t n = 1 + rng.below(12);
    const std::size_t k = 1 + rng.below(std::min<std::uint64_t>(4, n));
    const auto xs = detail::random_points(rng, n, 1 + rng.below(3), -20.0, 20.0);
    const double got = learn_centers_subset_erm(xs, k, m).cost;
    if (std::abs(got - testing::naive_best_subset_cost(xs, k, m)) > kTol)
      o.fail("set " + std::to_string(c) + ": subset ERM differs from naive enumeration");
  }
  // 1-D: integer samples in [0, 20], centers free on a half-unit grid.
  std::vector<double> grid;
  for (int g = 0; g <= 40; ++g) grid.push_back(0.5 * g);
  for (int c = 0; c < 100; ++c) {
    CounterRng rng = root.split(1000 + static_cast<std::uint64_t>(c));
    const std::size_t n = 1 + rng.below(12);
    const std::size_t k = 1 + rng.below(std::min<std::uint64_t>(4, n));
    std::vector<Point> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(Point{static_cast<double>(rng.below(21))});
    const double got = learn_centers_subset_erm(xs, k, Metric{Norm::L1}).cost;
    const double free = testing::grid_best_cost_1d(xs, k, grid);
    if (got > 2.0 * free + kTol) o.fail("1-D set " + std::to_string(c) + ": subset cost above 2x grid optimum");
    if (free > 0.0) worst = std::max(worst, got / free);
  }
  o.measured["max_ratio_to_grid_opt"] = worst;
  if (o.pass) o.detail << "100 + 100 sets, max ratio to grid optimum " << worst;
}

// 3. Omega(k) exhibit on the planted lower bound scenario.
inline void criterion_planted_lower_bound(detail::Outcome& o) {
  const int k = 4;
  const auto s = gen_planted_lower_bound(303, k, 1e6, 1000, 1);
  const std::size_t split = 500;
  const auto train = Hindsight::solutions(std::span<const HiddenInstance>(s.days).first(split));
  const auto centers = learn_centers(train, k, s.metric).centers;
  double radius = 0.0;
  for (std::size_t t = split; t < s.size(); ++t) radius += static_cast<double>(run_parallel_k(s.days[t], centers.centers).total_radius);
  const double n = static_cast<double>(s.size() - split);
  const double mean = radius / n;

  // best single prediction in hindsight on the evaluation days
  std::vector<Point> cand{Point::zeros(1)};
  for (std::size_t t = split; t < s.size(); ++t) cand.push_back(Hindsight::solution(s.days[t]));
  std::vector<Point> eval(cand.begin() + 1, cand.end());
  cand.push_back(one_median(eval, s.metric));
  double single = std::numeric_limits<double>::infinity();
  for (const auto& p : cand) {
    double tot = 0.0;
    for (const auto& x : eval) tot += static_cast<double>(search_steps(p, x, s.metric));
    single = std::min(single, tot / n);
  }
  o.measured["parallel_mean_radius"] = mean;
  o.measured["best_single_mean_radius"] = single;
  if (mean < k || mean > 2 * k) o.fail("parallel-k mean radius outside [k, 2k]");
  if (single < 1e5) o.fail("best single prediction mean below 1e5");
  o.detail << "parallel-k mean " << mean << ", best single mean " << single;
}

namespace detail {

inline std::vector<LabeledSample> random_labeled(CounterRng& rng, std::size_t n, std::size_t fdim, std::size_t sdim) {
  std::vector<LabeledSample> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(LabeledSample{random_point(rng, fdim, 0.0, 10.0), random_point(rng, sdim, -10.0, 10.0)});
  return out;
}

}  // namespace detail

// 4. Rotation construction constants.
inline void criterion_rotation(detail::Outcome& o) {
  CounterRng root(404);
  double worst = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < 100; ++c) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(c));
    const Metric m = detail::random_metric(rng);
    const int k = 1 + static_cast<int>(rng.below(4));
    const auto data = detail::random_labeled(rng, 5 + rng.below(26), 1 + rng.below(2), 1 + rng.below(2));
    const auto cls = enumerate_threshold_trees(data, k, 2);
    const auto& h = cls[rng.below(cls.size())];
    CenterSet C{detail::random_points(rng, static_cast<std::size_t>(k), data.front().solution.dim(), -10.0, 10.0)};
    const auto phi = construct_rotation(h, C, data, m);
    std::vector<Point> sols;
    for (const auto& d : data) sols.push_back(d.solution);
    const double lhs = c_loss(h, phi, C, data, m);
    const double rhs = 2.0 * cost_of_partition(h, data, m).cost + cost_of_centers(C, sols, m);
    worst = std::max(worst, lhs - rhs);
    if (lhs > rhs + kTol) o.fail("triple " + std::to_string(c) + ": rotated loss above 2*partition + centers");
  }
  o.measured["max_lhs_minus_rhs"] = worst;
  if (o.pass) o.detail << "100 triples, max lhs - rhs " << worst;
}

// 5. Conversion identity and rc-ERM vs brute force.
inline void criterion_rc_erm(detail::Outcome& o) {
  CounterRng root(505);
  for (int c = 0; c < 30; ++c) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(c));
    const Metric m = detail::random_metric(rng);
    const int k = 1 + static_cast<int>(rng.below(3));
    const auto data = detail::random_labeled(rng, 4 + rng.below(12), 1 + rng.below(2), 1 + rng.below(2));
    auto cls = enumerate_threshold_trees(data, k, 2);
    if (cls.size() > 50) cls.resize(50);
    CenterSet C{detail::random_points(rng, static_cast<std::size_t>(k), data.front().solution.dim(), -10.0, 10.0)};
    for (const auto& phi : all_rotations(k)) {
      const CenterSet pc = permute_centers(phi, C);
      for (const auto& h : cls) {
        if (c_loss(rotated(h, phi), C, data, m) != c_loss(h, pc, data, m))
          o.fail("case " + std::to_string(c) + ": loss of rotated hypothesis != loss under permuted centers");
      }
    }
    const auto rc = rc_erm(cls, C, data, m);
    if (std::abs(rc.loss - testing::naive_rc_erm_loss(cls, C, data, m)) > kTol)
      o.fail("case " + std::to_string(c) + ": rc_erm differs from brute force");
    if (std::abs(rc.loss - c_loss(rc.hypothesis, rc.rotation, C, data, m)) > kTol)
      o.fail("case " + std::to_string(c) + ": rc_erm loss does not match its witness");
  }
  if (o.pass) o.detail << "30 cases, all rotations, class <= 50";
}

// 6. Predict-yesterday against the best single trajectory.
inline void criterion_predict_yesterday(detail::Outcome& o) {
  CounterRng root(606);
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(c));
    const Metric m = detail::random_metric(rng);
    const std::size_t T = 1 + rng.below(8);
    const auto sols = detail::random_points(rng, T, 1 + rng.below(3), -20.0, 20.0);
    const auto days = detail::days_of(sols, m);
    const auto py = predict_yesterday(days);
    const double opt = brute_force_best_trajectories(sols, 1, m).cost;
    const double bound = 2.0 * opt + static_cast<double>(T);
    if (static_cast<double>(py.totals.radius) > bound) o.fail("scenario " + std::to_string(c) + ": above 2*opt + T");
    worst = std::max(worst, static_cast<double>(py.totals.radius) / bound);
  }
  o.measured["max_fraction_of_bound"] = worst;
  if (o.pass) o.detail << "50 scenarios, max radius / bound " << worst;
}

// 7. Trajectory / k-server sandwich, plus flow vs schedule enumeration.
inline void criterion_sandwich(detail::Outcome& o) {
  CounterRng root(707);
  for (int c = 0; c < 50; ++c) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(c));
    const Metric m = detail::random_metric(rng);
    const std::size_t T = 1 + rng.below(6);
    const auto sols = detail::random_points(rng, T, 1 + rng.below(3), -20.0, 20.0);
    for (int k = 1; k <= 3; ++k) {
      const double traj = brute_force_best_trajectories(sols, k, m).cost;
      const double server = offline_opt_kserver(sols, k, m);
      if (traj > server + kTol || server > 2.0 * traj + kTol)
        o.fail("instance " + std::to_string(c) + ", k=" + std::to_string(k) + ": sandwich violated");
      if (T <= 5 && std::abs(server - testing::naive_kserver_opt(sols, k, m)) > kTol)
        o.fail("instance " + std::to_string(c) + ", k=" + std::to_string(k) + ": flow != schedule enumeration");
    }
  }
  if (o.pass) o.detail << "50 instances x k in {1,2,3}";
}

// 8-10 share corpus runs.
struct CorpusDecayStats {
  bool invariants_ok = true;
  std::string first_violation;
  double max_radius_over_virtual = 0.0;
  double max_overhead_over_radius = 0.0;
  std::size_t runs = 0;
};

inline CorpusDecayStats corpus_decay_stats(DecayMode mode) {
  CorpusDecayStats st;
  for (const auto& s : corpus()) {
    ++st.runs;
    try {
      const auto l = run_quadratic_decay(s.days, mode);
      for (const auto& d : l.days) {
        st.max_radius_over_virtual = std::max(
            st.max_radius_over_virtual, static_cast<double>(d.radius_searched) / static_cast<double>(d.virtual_radius));
        st.max_overhead_over_radius = std::max(
            st.max_overhead_over_radius, static_cast<double>(d.overhead_work) / static_cast<double>(d.radius_searched));
      }
    } catch (const InvariantViolation& e) {
      if (st.invariants_ok) st.first_violation = scenario_key(s) + ": " + e.what();
      st.invariants_ok = false;
    }
  }
  return st;
}

inline void criterion_decay_invariants(detail::Outcome& o) {
  for (DecayMode mode : {DecayMode::Quadratic, DecayMode::Harmonic}) {
    const auto st = corpus_decay_stats(mode);
    if (!st.invariants_ok) o.fail(std::string(to_string(mode)) + ": " + st.first_violation);
  }
  if (o.pass) o.detail << corpus().size() << " corpus scenarios x {quadratic, harmonic}, no assertion fired";
}

/// Sum_{i=2}^{n} 1/(i^2 ln^2 i) (quadratic) or 1/(i ln^2 i) (harmonic),
/// summed from the small end up.
inline double rate_series(DecayMode mode, long long n) {
  double s = 0.0;
  for (long long i = n; i >= 2; --i) s += rate(i, mode);
  return s;
}

inline void criterion_virtual_radius(detail::Outcome& o) {
  const long long n = 1'000'000;
  const double partial = rate_series(DecayMode::Quadratic, n);
  const double ln = std::log(static_cast<double>(n));
  const double tail = 1.0 / (static_cast<double>(n) * ln * ln);  // integral of 1/(x^2 ln^2 x) from n, bounded
  o.measured["series_partial"] = partial;
  o.measured["series_tail_bound"] = tail;
  if (!(partial + tail < 1.0)) o.fail("series bound not below 1");
  const auto st = corpus_decay_stats(DecayMode::Quadratic);
  o.measured["max_radius_over_virtual"] = st.max_radius_over_virtual;
  if (!st.invariants_ok) o.fail("invariant violation: " + st.first_violation);
  if (st.max_radius_over_virtual > kRadiusOverVirtualFactor) o.fail("radius_searched above 2 * virtual_radius");
  if (o.pass)
    o.detail << "series " << partial << " + tail " << tail << "; max radius/virtual " << st.max_radius_over_virtual;
}

inline void criterion_overhead(detail::Outcome& o) {
  const auto st = corpus_decay_stats(DecayMode::Quadratic);
  o.measured["max_overhead_over_radius"] = st.max_overhead_over_radius;
  if (!st.invariants_ok) o.fail("invariant violation: " + st.first_violation);
  if (st.max_overhead_over_radius > kOverheadOverRadiusFactor) o.fail("overhead_work above 8 * radius_searched");
  if (o.pass) o.detail << "max overhead/radius " << st.max_overhead_over_radius;
}

// 11. One k-oblivious run measured against every k.
inline double theorem_bound(int k) {
  const double l = std::log(static_cast<double>(k) + 1.0);
  return kTheoremConstant * std::pow(static_cast<double>(k), 4) * l * l;
}

inline std::map<std::string, double> drifting_ratios() {
  std::map<std::string, double> out;
  for (int kg = 1; kg <= 3; ++kg) {
    const auto s = gen_drifting_trajectories(1100 + static_cast<std::uint64_t>(kg), kg, 1.0, 0.5, 40, 2);
    const auto l = run_quadratic_decay(s.days);
    const auto sols = s.solutions();
    const double total = static_cast<double>(l.totals.radius);
    for (int k = 1; k <= 3; ++k) {
      const std::string tag = "gen_k=" + std::to_string(kg) + "/k=" + std::to_string(k);
      out[tag + "/kserver_half"] = total / (offline_opt_kserver(sols, k, s.metric) / 2.0);
      if (k == kg) out[tag + "/planted"] = total / trajectory_cost(*s.meta.planted, sols, s.metric).total;
    }
  }
  return out;
}

inline void criterion_theorem(detail::Outcome& o, const std::map<std::string, double>* goldens) {
  o.measured = drifting_ratios();
  double worst = 0.0;
  for (const auto& [tag, ratio] : o.measured) {
    const int k = tag[tag.find("/k=") + 3] - '0';
    worst = std::max(worst, ratio / theorem_bound(k));
    if (!(ratio <= theorem_bound(k))) o.fail(tag + ": ratio above 1000 k^4 ln^2(k+1)");
    if (goldens) {
      const auto it = goldens->find(tag);
      if (it == goldens->end())
        o.fail(tag + ": no golden value");
      else if (std::abs(it->second - ratio) > kTol * std::max(1.0, std::abs(ratio)))
        o.fail(tag + ": ratio drifted from golden");
    }
  }
  if (o.pass) {
    o.detail << "max ratio / bound " << worst << (goldens ? ", goldens match" : ", goldens not checked");
    for (const auto& [tag, r] : o.measured)
      if (tag.find("planted") != std::string::npos) o.detail << "; " << tag << " " << r;
  }
}

// 12. Reduction inequality and the k = 1 collapse.
inline void criterion_kserver(detail::Outcome& o) {
  std::size_t runs = 0;
  for (const auto& s : corpus()) {
    const auto py = predict_yesterday(s.days);
    for (auto alg : {ServerAlgorithm::Greedy, ServerAlgorithm::WorkFunction}) {
      for (int k = 1; k <= 3; ++k) {
        ++runs;
        const auto l = kserver_reduction(s.days, alg, k);
        for (const auto& d : l.days) {
          const double bound = k * std::max(1.0, *d.nearest_distance) + k;
          if (static_cast<double>(d.radius_searched) > bound)
            o.fail(scenario_key(s) + " day " + std::to_string(d.day) + ": radius above k*max(1,nearest)+k");
        }
        if (k == 1) {
          bool same = l.totals.radius == py.totals.radius;
          for (std::size_t t = 0; same && t < l.days.size(); ++t)
            same = l.days[t].radius_searched == py.days[t].radius_searched;
          if (!same) o.fail(scenario_key(s) + ": k=1 reduction differs from predict-yesterday");
        }
      }
    }
  }
  if (o.pass) o.detail << runs << " runs";
}

// 13. Determinism of simulate / learn / report.
inline void criterion_determinism(detail::Outcome& o) {
  std::vector<RunConfig> cfgs;
  for (const auto& st : strategy_names()) {
    RunConfig c;
    c.scenario.generator = "static_clusters";
    c.scenario.seed = 1313;
    c.scenario.params = {{"k", 2}, {"T", 16}, {"dim", 2}};
    c.strategy = st;
    c.k = 2;
    cfgs.push_back(c);
  }
  std::vector<CostLedger> ledgers;
  for (const auto& c : cfgs) {
    const auto a = cmd_simulate(c), b = cmd_simulate(c);
    if (a.text != b.text) o.fail("simulate " + c.strategy + ": outputs differ");
    if (parse_ledger(a.text) != a.ledger) o.fail("simulate " + c.strategy + ": ledger does not round-trip");
    ledgers.push_back(a.ledger);
  }
  for (const char* learner : {"kmedians", "partition"}) {
    RunConfig c = cfgs.front();
    c.learner = learner;
    if (cmd_learn(c) != cmd_learn(c)) o.fail(std::string("learn ") + learner + ": outputs differ");
  }
  const auto r1 = cmd_report(ledgers), r2 = cmd_report(ledgers);
  if (r1.csv != r2.csv || r1.json != r2.json) o.fail("report: outputs differ");
  if (o.pass) o.detail << cfgs.size() << " simulate configs, 2 learners, 1 report; byte-identical";
}

struct Criterion {
  int id;
  const char* title;
  double limit_seconds;
  std::function<void(detail::Outcome&)> body;
};

inline std::vector<Criterion> criteria(const std::map<std::string, double>* theorem_goldens) {
  return {
      {1, "parallel-k radius <= k*steps(nearest) + k", 1.0, criterion_parallel_k},
      {2, "subset ERM exact; <= 2x grid optimum in 1-D", 10.0, criterion_subset_erm},
      {3, "Omega(k) exhibit on planted lower bound", 5.0, criterion_planted_lower_bound},
      {4, "rotation: loss <= 2*partition + centers", 5.0, criterion_rotation},
      {5, "rotation identity exact; rc-ERM = brute force", 5.0, criterion_rc_erm},
      {6, "predict-yesterday <= 2*opt_1_traj + T", 30.0, criterion_predict_yesterday},
      {7, "opt_traj <= opt_kserver <= 2*opt_traj", 60.0, criterion_sandwich},
      {8, "decay invariants (subsuming identity, shadow completion)", 60.0, criterion_decay_invariants},
      {9, "radius_searched <= 2*virtual_radius; series < 1", 60.0, criterion_virtual_radius},
      {10, "overhead_work <= 8*radius_searched", 60.0, criterion_overhead},
      {11, "one decay run within 1000 k^4 ln^2(k+1) for every k", 60.0,
       [theorem_goldens](detail::Outcome& o) { criterion_theorem(o, theorem_goldens); }},
      {12, "k-server reduction inequality; k=1 equals predict-yesterday", 60.0, criterion_kserver},
      {13, "simulate/learn/report byte-identical on rerun", 60.0, criterion_determinism},
  };
}

/// Runs one criterion. Exceptions count as failures; so does exceeding the
/// time limit.
inline CriterionResult run_criterion(const Criterion& c) {
  CriterionResult r;
  r.id = c.id;
  r.title = c.title;
  r.limit_seconds = c.limit_seconds;
  detail::Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    c.body(o);
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds > c.limit_seconds) o.fail("time limit exceeded");
  r.pass = o.pass;
  r.detail = o.detail.str();
  r.measured = std::move(o.measured);
  return r;
}

inline std::string format_line(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.pass ? "PASS" : "FAIL") << "  criterion " << r.id << ": " << r.title << " [" << std::fixed;
  s.precision(2);
  s << r.seconds << "s / " << r.limit_seconds << "s] " << r.detail;
  return s.str();
}

}  // namespace warmstart::acceptance
