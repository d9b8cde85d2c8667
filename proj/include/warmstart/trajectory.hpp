#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "warmstart/errors.hpp"
#include "warmstart/metric.hpp"

namespace warmstart {

/// k trajectories over T days: day t (0-based) belongs to trajectory
/// assignment[t] and predicts predictions[t]. Every trajectory starts at
/// the origin.
struct TrajectorySet {
  int k = 1;
  std::vector<int> assignment;
  std::vector<Point> predictions;

  std::size_t days() const { return assignment.size(); }

  void validate() const {
    require(k >= 1, "trajectory set needs k >= 1");
    require(assignment.size() == predictions.size(), "trajectory set: a prediction is missing for some day");
    for (int a : assignment) require(a >= 0 && a < k, "trajectory id out of range");
    for (const auto& p : predictions) require_same_dim(p, predictions.front());
  }

  /// Previous day on the same trajectory, or -1 when t is its first day.
  long prev(std::size_t t) const {
    for (std::size_t s = t; s-- > 0;)
      if (assignment[s] == assignment[t]) return static_cast<long>(s);
    return -1;
  }

  /// Next day on the same trajectory, or -1 when t is its last day.
  long next(std::size_t t) const {
    for (std::size_t s = t + 1; s < assignment.size(); ++s)
      if (assignment[s] == assignment[t]) return static_cast<long>(s);
    return -1;
  }

  bool operator==(const TrajectorySet&) const = default;
};

struct TrajectoryCost {
  double hit = 0.0;
  double movement = 0.0;
  double total = 0.0;
};

inline TrajectoryCost trajectory_cost(const TrajectorySet& ts, std::span<const Point> solutions, Metric m) {
  ts.validate();
  require(solutions.size() == ts.days(), "trajectory set and solution sequence differ in length");
  TrajectoryCost out;
  if (ts.days() == 0) return out;
  const Point origin = Point::zeros(ts.predictions.front().dim());
  std::vector<const Point*> last(static_cast<std::size_t>(ts.k), &origin);
  for (std::size_t t = 0; t < ts.days(); ++t) {
    auto& prev = last[static_cast<std::size_t>(ts.assignment[t])];
    out.hit += distance(ts.predictions[t], solutions[t], m);
    out.movement += distance(*prev, ts.predictions[t], m);
    prev = &ts.predictions[t];
  }
  out.total = out.hit + out.movement;
  return out;
}

}  // namespace warmstart
