#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "warmstart/baselines.hpp"
#include "warmstart/errors.hpp"
#include "warmstart/ledger.hpp"
#include "warmstart/metric.hpp"
#include "warmstart/oracle.hpp"

namespace warmstart {

// ---------------------------------------------------------------------------
// Predict yesterday's solution

/// Day 1 searches from the origin, day t from S_{t-1}. Single thread.
inline CostLedger predict_yesterday(std::span<const HiddenInstance> days) {
  require(!days.empty(), "predict_yesterday: empty scenario");
  CostLedger out;
  out.strategy = "predict-yesterday";
  Point prev = Point::zeros(days.front().solution_dim());
  long long prev_day = 0;
  for (const auto& inst : days) {
    SearchThread t(inst, prev);
    const long long r = t.run_to_completion();
    DayLedger d;
    d.day = inst.day();
    d.radius_searched = r;
    d.virtual_radius = r;
    d.solver = prev_day;
    d.nearest_distance = distance(prev, t.reveal(), inst.metric());
    out.days.push_back(d);
    prev = t.reveal();
    prev_day = static_cast<long long>(inst.day());
  }
  out.recompute_totals();
  return out;
}

// ---------------------------------------------------------------------------
// Rate-decay scheduling (quadratic and harmonic)

enum class DecayMode { Quadratic, Harmonic };

inline std::string_view to_string(DecayMode m) { return m == DecayMode::Quadratic ? "quadratic" : "harmonic"; }

/// Rate of the thread at rank i (1 = fastest): 1 for i = 1, otherwise
/// 1/(i^2 ln^2 i) (quadratic) or 1/(i ln^2 i) (harmonic).
inline double rate(long long rank, DecayMode mode) {
  require(rank >= 1, "rate: rank must be at least 1");
  if (rank == 1) return 1.0;
  const double i = static_cast<double>(rank);
  const double l = std::log(i);
  return mode == DecayMode::Quadratic ? 1.0 / (i * i * l * l) : 1.0 / (i * l * l);
}

/// One search thread in the decay schedule. Threads are identified by
/// their position in the initial list; source_day 0 is the origin.
struct ThreadEntry {
  long long source_day = 0;
  Point source;
  long long radius = 0;
  long long shadow_radius = 0;  // keeps growing at the subsumer's pace after a kill
  bool alive = true;
  std::optional<std::size_t> subsumed_by;  // direct killer
  std::optional<std::size_t> ultimate;     // alive thread that currently subsumes this one
};

/// Kill test: the slow thread's ball lies inside the fast thread's ball.
/// Charges one unit of overhead (a distance query).
inline bool subsume_check(const ThreadEntry& slow, const ThreadEntry& fast, Metric m, long long& overhead) {
  ++overhead;
  return distance(slow.source, fast.source, m) <= static_cast<double>(fast.radius - slow.radius);
}

struct KillEvent {
  long long virtual_time = 0;
  long long killed_source_day = 0;
  long long killer_source_day = 0;
  long long killed_rank = 0;  // rank of the killed thread just before removal
};

struct DecayDayResult {
  Point solution;
  DayLedger ledger;
  std::vector<KillEvent> kills;
  std::vector<ThreadEntry> threads;  // final state, initial list order
};

struct DecayOptions {
  bool check_invariants = true;
  double tolerance = 1e-9;
};

namespace detail {

class DecayDay {
 public:
  DecayDay(std::span<const Point> history, const HiddenInstance& inst, DecayMode mode, DecayOptions opt)
      : inst_(inst), metric_(inst.metric()), mode_(mode), opt_(opt) {
    const std::size_t dim = inst.solution_dim();
    // most recent solution first, origin last
    for (std::size_t i = history.size(); i-- > 0;) add(static_cast<long long>(i) + 1, history[i]);
    add(0, Point::zeros(dim));
    for (std::size_t i = 0; i < entries_.size(); ++i) active_.push_back(i);
  }

  DecayDayResult run() {
    const std::size_t n = entries_.size();
    std::vector<double> rates(n + 1);
    for (std::size_t i = 1; i <= n; ++i) rates[i] = rate(static_cast<long long>(i), mode_);

    long long v = 0;
    std::optional<std::size_t> winner;
    std::vector<std::pair<std::size_t, long long>> due;  // (thread id, steps this tick)
    while (!winner) {
      ++v;
      due.clear();
      const double vd = static_cast<double>(v);
      for (std::size_t rank = 1; rank <= active_.size(); ++rank) {
        const double r = rates[rank];
        if (rank >= 2 && vd * r < 1.0) break;  // rates decrease from rank 2 on
        const long long cnt = static_cast<long long>(std::floor(vd * r)) -
                              static_cast<long long>(std::floor((vd - 1.0) * r));
        if (cnt > 0) due.emplace_back(active_[rank - 1], cnt);
      }
      for (const auto& [id, cnt] : due) {
        for (long long c = 0; c < cnt && entries_[id].alive && !winner; ++c) {
          if (step(id, v)) winner = id;
        }
        if (winner) break;
      }
    }

    if (opt_.check_invariants) check_subsuming_identity();

    DecayDayResult out;
    out.solution = threads_[*winner].reveal();
    auto& d = out.ledger;
    d.day = inst_.day();
    for (const auto& t : threads_) d.radius_searched += t.radius();
    d.overhead_work = overhead_;
    d.virtual_radius = entries_[active_.front()].radius;
    d.solver = entries_[*winner].source_day;
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& e : entries_) nearest = std::min(nearest, distance(e.source, out.solution, metric_));
    d.nearest_distance = nearest;
    out.kills = std::move(kills_);
    out.threads = std::move(entries_);
    return out;
  }

 private:
  void add(long long source_day, const Point& p) {
    ThreadEntry e;
    e.source_day = source_day;
    e.source = p;
    entries_.push_back(std::move(e));
    threads_.emplace_back(inst_, p);
    needed_.push_back(search_steps(p, Hindsight::solution(inst_), metric_));
  }

  std::size_t rank_of(std::size_t id) const {
    return static_cast<std::size_t>(std::find(active_.begin(), active_.end(), id) - active_.begin()) + 1;
  }

  // One step of an alive thread; returns true when it completes the day.
  bool step(std::size_t id, long long v) {
    const std::size_t rank = rank_of(id);
    overhead_ += static_cast<long long>(rank);  // walk the list to the thread
    const bool done = threads_[id].step();
    auto& e = entries_[id];
    e.radius = threads_[id].radius();
    e.shadow_radius = e.radius;

    for (std::size_t j = 0; j < entries_.size(); ++j) {
      auto& s = entries_[j];
      if (s.alive || s.ultimate != id) continue;
      ++s.shadow_radius;
      if (opt_.check_invariants && s.shadow_radius >= needed_[j]) {
        ensure(done, "subsumed thread (source day " + std::to_string(s.source_day) +
                         ") reached the solution but its subsumer has not completed");
      }
    }
    if (done) return true;

    for (std::size_t r = 1; r < rank; ++r) {
      const std::size_t f = active_[r - 1];
      if (subsume_check(e, entries_[f], metric_, overhead_)) {
        kill(id, f, rank, v);
        break;
      }
    }
    return false;
  }

  void kill(std::size_t victim, std::size_t killer, std::size_t rank, long long v) {
    ++overhead_;  // unlink
    auto& e = entries_[victim];
    e.alive = false;
    e.subsumed_by = killer;
    e.ultimate = killer;
    for (auto& s : entries_)
      if (!s.alive && s.ultimate == victim) s.ultimate = killer;
    active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(rank - 1));
    kills_.push_back(KillEvent{v, e.source_day, entries_[killer].source_day, static_cast<long long>(rank)});
    if (opt_.check_invariants) {
      check_subsuming_identity();
      for (std::size_t r = 0; r < active_.size(); ++r)
        ensure(rank_of(active_[r]) == r + 1, "alive ranks are not contiguous");
    }
  }

  void check_subsuming_identity() const {
    for (const auto& s : entries_) {
      if (s.alive) {
        ensure(s.shadow_radius == s.radius, "alive thread with shadow radius != radius");
        continue;
      }
      ensure(s.ultimate.has_value() && entries_[*s.ultimate].alive, "subsumption chain does not end at an alive thread");
      const auto& top = entries_[*s.ultimate];
      const double lhs = distance(top.source, s.source, metric_);
      const double rhs = static_cast<double>(top.radius - s.shadow_radius);
      ensure(lhs <= rhs + opt_.tolerance, "subsuming identity violated: d(S_i, S_j) = " + std::to_string(lhs) +
                                              " > radius(i) - radius(j) = " + std::to_string(rhs));
    }
  }

  const HiddenInstance& inst_;
  Metric metric_;
  DecayMode mode_;
  DecayOptions opt_;
  std::vector<ThreadEntry> entries_;
  std::vector<SearchThread> threads_;
  std::vector<long long> needed_;  // simulator-side, for the self-checks only
  std::vector<std::size_t> active_;
  std::vector<KillEvent> kills_;
  long long overhead_ = 0;
};

}  // namespace detail

/// One day of the rate-decay search. The active list is
/// [S_{t-1}, S_{t-2}, ..., S_1, origin]; the thread at rank i steps each
/// time floor(V * rate(i)) increments, V being the virtual time (one tick
/// per rank-1 step). After every step the thread is tested against the
/// faster threads in rank order and killed by the first that subsumes it;
/// slower threads move up one rank. Stops at the first completion.
inline DecayDayResult quadratic_decay_day(std::span<const Point> history, const HiddenInstance& inst,
                                          DecayMode mode = DecayMode::Quadratic, DecayOptions opt = {}) {
  for (const auto& p : history) require(p.dim() == inst.solution_dim(), "history and instance dimensions differ");
  return detail::DecayDay(history, inst, mode, opt).run();
}

/// Runs the decay strategy over a scenario, feeding each day's revealed
/// solution into the history. Takes no k: one run serves every k.
inline CostLedger run_quadratic_decay(std::span<const HiddenInstance> days, DecayMode mode = DecayMode::Quadratic,
                                      DecayOptions opt = {}) {
  require(!days.empty(), "run_quadratic_decay: empty scenario");
  CostLedger out;
  out.strategy = mode == DecayMode::Quadratic ? "quadratic-decay" : "harmonic-decay";
  std::vector<Point> history;
  for (const auto& inst : days) {
    auto r = quadratic_decay_day(history, inst, mode, opt);
    out.days.push_back(r.ledger);
    history.push_back(std::move(r.solution));
  }
  out.recompute_totals();
  return out;
}

// ---------------------------------------------------------------------------
// Reduction to k-server

enum class ServerAlgorithm { Greedy, WorkFunction };

inline ServerAlgorithm server_algorithm_from_string(std::string_view s) {
  if (s == "greedy") return ServerAlgorithm::Greedy;
  if (s == "wfa") return ServerAlgorithm::WorkFunction;
  throw UsageError("unknown k-server algorithm '" + std::string(s) + "' (expected greedy or wfa)");
}

/// Each day searches from the k server positions at equal rates, then
/// feeds the revealed solution as a request to the k-server algorithm,
/// which moves exactly one server onto it. WFA falls back to greedy for
/// the rest of the run once its configuration cap is exceeded; the
/// fallback day is recorded in measured["wfa_fallback_day"].
inline CostLedger kserver_reduction(std::span<const HiddenInstance> days, ServerAlgorithm alg, int k) {
  require(!days.empty(), "kserver_reduction: empty scenario");
  require(k >= 1, "kserver_reduction: k must be at least 1");
  CostLedger out;
  out.strategy = alg == ServerAlgorithm::Greedy ? "kserver-greedy" : "kserver-wfa";
  const std::size_t dim = days.front().solution_dim();
  const Metric m = days.front().metric();
  std::vector<Point> servers(static_cast<std::size_t>(k), Point::zeros(dim));
  std::optional<WorkFunctionState> wfa;
  if (alg == ServerAlgorithm::WorkFunction) {
    require(k <= WorkFunctionState::kMaxServers, "kserver-wfa supports k <= 3");
    wfa.emplace(k, dim, m);
  }
  double movement = 0.0;
  for (const auto& inst : days) {
    const auto pr = run_parallel_k(inst, servers);
    DayLedger d;
    d.day = inst.day();
    d.radius_searched = pr.total_radius;
    d.virtual_radius = pr.sweeps;
    d.solver = static_cast<long long>(pr.winner);
    double nearest = std::numeric_limits<double>::infinity();
    std::size_t nearest_idx = 0;
    for (std::size_t s = 0; s < servers.size(); ++s) {
      const double dd = distance(servers[s], pr.solution, m);
      ++d.overhead_work;
      if (dd < nearest) {
        nearest = dd;
        nearest_idx = s;
      }
    }
    d.nearest_distance = nearest;

    std::size_t moved = nearest_idx;
    if (wfa && wfa->would_exceed_cap(pr.solution)) {
      out.measured["wfa_fallback_day"] = static_cast<double>(inst.day());
      wfa.reset();
    }
    if (wfa) {
      const long long before = wfa->work_units();
      moved = static_cast<std::size_t>(wfa_step(*wfa, pr.solution).server);
      d.overhead_work += wfa->work_units() - before;
    }
    d.movement = distance(servers[moved], pr.solution, m);
    movement += d.movement;
    servers[moved] = pr.solution;
    out.days.push_back(d);
  }
  out.measured["kserver_movement"] = movement;
  out.recompute_totals();
  return out;
}

}  // namespace warmstart
