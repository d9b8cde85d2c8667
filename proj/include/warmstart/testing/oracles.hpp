#pragma once

// Naive reference implementations used only by tests and the selftest
// command. Each one is written independently of the library routine it
// checks: plain loops, no shared helpers beyond distance().

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "warmstart/metric.hpp"
#include "warmstart/oracle.hpp"
#include "warmstart/partition.hpp"

namespace warmstart::testing {

/// Round robin one step at a time: full sweeps until a sweep ends with a
/// completed thread. Returns the summed radius.
inline long long naive_parallel_radius(const HiddenInstance& inst, std::span<const Point> preds) {
  std::vector<SearchThread> threads;
  for (const auto& p : preds) threads.emplace_back(inst, p);
  while (true) {
    bool any = false;
    for (auto& t : threads) any = t.step() || any;
    if (any) break;
  }
  long long total = 0;
  for (const auto& t : threads) total += t.radius();
  return total;
}

/// Minimum mean nearest-center distance over all k-subsets of `xs`,
/// by bitmask enumeration.
inline double naive_best_subset_cost(std::span<const Point> xs, std::size_t k, Metric m) {
  const std::size_t n = xs.size();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != k) continue;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double near = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < n; ++c)
        if (mask >> c & 1UL) near = std::min(near, distance(xs[c], xs[i], m));
      total += near;
    }
    best = std::min(best, total / static_cast<double>(n));
  }
  return best;
}

/// Minimum mean cost over k-subsets of an explicit grid of 1-D centers.
inline double grid_best_cost_1d(std::span<const Point> xs, std::size_t k, const std::vector<double>& grid) {
  const Metric m{Norm::L1};
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (pick.size() == k) {
      double total = 0.0;
      for (const auto& x : xs) {
        double near = std::numeric_limits<double>::infinity();
        for (std::size_t g : pick) near = std::min(near, distance(Point{grid[g]}, x, m));
        total += near;
      }
      best = std::min(best, total / static_cast<double>(xs.size()));
      return;
    }
    for (std::size_t g = from; g < grid.size(); ++g) {
      pick.push_back(g);
      rec(g + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return best;
}

/// Offline k-server optimum by enumerating all k^T server schedules.
inline double naive_kserver_opt(std::span<const Point> requests, int k, Metric m) {
  const std::size_t T = requests.size();
  const Point origin = Point::zeros(requests.front().dim());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> who(T, 0);
  while (true) {
    std::vector<Point> pos(static_cast<std::size_t>(k), origin);
    double cost = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      auto& p = pos[static_cast<std::size_t>(who[t])];
      cost += distance(p, requests[t], m);
      p = requests[t];
    }
    best = std::min(best, cost);
    std::size_t i = 0;
    while (i < T && who[i] == k - 1) who[i++] = 0;
    if (i == T) break;
    ++who[i];
  }
  return best;
}

/// Best c_loss over every (hypothesis, rotation) pair, rotations generated
/// by base-k counting. Returns the minimum loss.
inline double naive_rc_erm_loss(const HypothesisClass& cls, const CenterSet& c, std::span<const LabeledSample> data,
                                Metric m) {
  const int k = static_cast<int>(c.k());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> map(static_cast<std::size_t>(k), 0);
  while (true) {
    const Rotation phi{map};
    for (const auto& h : cls) {
      double total = 0.0;
      for (const auto& s : data) total += distance(s.solution, c.centers[static_cast<std::size_t>(map[static_cast<std::size_t>(h(s.features))])], m);
      best = std::min(best, total / static_cast<double>(data.size()));
    }
    std::size_t i = 0;
    while (i < map.size() && map[i] == k - 1) map[i++] = 0;
    if (i == map.size()) break;
    ++map[i];
  }
  return best;
}

/// Exact 1-D k-median of the samples by dynamic programming over sorted
/// contiguous groups (each group served by its lower median).
inline double exact_kmedian_1d(std::vector<double> xs, std::size_t k) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  auto group = [&](std::size_t a, std::size_t b) {  // [a, b)
    const double med = xs[a + (b - a - 1) / 2];
    double s = 0.0;
    for (std::size_t i = a; i < b; ++i) s += std::abs(xs[i] - med);
    return s;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> f(k + 1, std::vector<double>(n + 1, inf));
  f[0][0] = 0.0;
  for (std::size_t j = 1; j <= k; ++j)
    for (std::size_t b = 1; b <= n; ++b)
      for (std::size_t a = 0; a < b; ++a)
        if (f[j - 1][a] < inf) f[j][b] = std::min(f[j][b], f[j - 1][a] + group(a, b));
  double best = inf;
  for (std::size_t j = 1; j <= k; ++j) best = std::min(best, f[j][n]);
  return best / static_cast<double>(n);
}

}  // namespace warmstart::testing
