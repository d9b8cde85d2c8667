#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "warmstart/errors.hpp"
#include "warmstart/metric.hpp"

namespace warmstart {

class SearchThread;
struct Hindsight;

/// One day's instance. The features are visible; the solution is only
/// reachable by completing a SearchThread on it, or through Hindsight
/// (offline baselines and serialization).
class HiddenInstance {
 public:
  HiddenInstance(std::size_t day, Point features, Point solution, Metric metric)
      : day_(day), features_(std::move(features)), solution_(std::move(solution)), metric_(metric) {}

  std::size_t day() const { return day_; }
  const Point& features() const { return features_; }
  Metric metric() const { return metric_; }
  std::size_t solution_dim() const { return solution_.dim(); }

  bool operator==(const HiddenInstance&) const = default;

 private:
  friend class SearchThread;
  friend struct Hindsight;

  std::size_t day_;
  Point features_;
  Point solution_;
  Metric metric_;
};

/// Read access to hidden solutions for code that is allowed to see the
/// whole input: offline baselines, generators, serializers.
struct Hindsight {
  static const Point& solution(const HiddenInstance& inst) { return inst.solution_; }

  static std::vector<Point> solutions(std::span<const HiddenInstance> days) {
    std::vector<Point> out;
    out.reserve(days.size());
    for (const auto& d : days) out.push_back(d.solution_);
    return out;
  }
};

/// A warm-start run from one prediction, advanced one unit step at a time.
/// Completes exactly when radius reaches search_steps(origin, solution).
class SearchThread {
 public:
  SearchThread(const HiddenInstance& inst, Point origin)
      : inst_(&inst), origin_(std::move(origin)) {
    require_same_dim(origin_, inst.solution_);
    needed_ = search_steps(origin_, inst.solution_, inst.metric_);
  }

  const Point& origin() const { return origin_; }
  long long radius() const { return radius_; }
  bool completed() const { return radius_ >= needed_; }

  bool step() {
    if (completed()) throw UsageError("step on a completed search thread");
    ++radius_;
    return completed();
  }

  /// Equivalent to calling step() until completion; returns the steps taken.
  long long run_to_completion() {
    if (completed()) throw UsageError("step on a completed search thread");
    const long long taken = needed_ - radius_;
    radius_ = needed_;
    return taken;
  }

  const Point& reveal() const {
    if (!completed()) throw UsageError("reveal before the search thread completed");
    return inst_->solution_;
  }

 private:
  friend std::size_t advance_round_robin(std::span<SearchThread> threads);

  const HiddenInstance* inst_;
  Point origin_;
  long long radius_ = 0;
  long long needed_ = 1;
};

inline SearchThread open_thread(const HiddenInstance& inst, const Point& p) {
  return SearchThread(inst, p);
}

/// Round-robin equal-rate interleaving: whole sweeps, one step per thread in
/// list order, until a sweep ends with at least one completed thread.
/// Returns the index of the earliest completed thread in list order.
/// Sweeps that provably complete nothing are applied in bulk.
inline std::size_t advance_round_robin(std::span<SearchThread> threads) {
  require(!threads.empty(), "round robin over an empty thread list");
  for (const auto& t : threads) require(!t.completed(), "round robin over a completed thread");
  long long sweeps = threads.front().needed_ - threads.front().radius_;
  for (const auto& t : threads) sweeps = std::min(sweeps, t.needed_ - t.radius_);
  for (auto& t : threads) t.radius_ += sweeps - 1;
  for (auto& t : threads) t.step();
  for (std::size_t i = 0; i < threads.size(); ++i) {
    if (threads[i].completed()) return i;
  }
  throw InvariantViolation("round robin finished a sweep with no completed thread");
}

struct ParallelResult {
  Point solution;
  long long total_radius = 0;
  std::size_t winner = 0;    // index into the prediction list
  long long sweeps = 0;      // per-thread radius at the stop
};

/// k predictions run in parallel (interleaved on one timeline).
/// total_radius = k * (sweeps until the first completion).
inline ParallelResult run_parallel_k(const HiddenInstance& inst, std::span<const Point> preds) {
  require(!preds.empty(), "run_parallel_k: empty prediction list");
  std::vector<SearchThread> threads;
  threads.reserve(preds.size());
  for (const auto& p : preds) threads.emplace_back(inst, p);
  const std::size_t winner = advance_round_robin(threads);
  ParallelResult out{threads[winner].reveal(), 0, winner, threads[winner].radius()};
  for (const auto& t : threads) out.total_radius += t.radius();
  return out;
}

}  // namespace warmstart
