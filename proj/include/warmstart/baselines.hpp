#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "warmstart/errors.hpp"
#include "warmstart/kmedians.hpp"
#include "warmstart/metric.hpp"
#include "warmstart/min_cost_flow.hpp"
#include "warmstart/trajectory.hpp"

namespace warmstart {

/// Offline optimal k-server cost, all servers starting at the origin.
///
/// Network (node ids in topological order): S*, s, then out_t/in_t per
/// request, then sink, T*. "Some server visits request t" is a lower bound
/// of 1 on in_t -> out_t; it is eliminated by giving out_t one unit of
/// supply and in_t one unit of demand, both routed through S*/T*. Arc costs:
/// s -> in_t is d(origin, r_t), out_i -> in_j (i < j) is d(r_i, r_j), and
/// everything else is free. A feasible flow of k + T units is an optimal
/// schedule; its cost is the total movement.
inline double offline_opt_kserver(std::span<const Point> requests, int k, Metric m) {
  require(k >= 1, "offline_opt_kserver: k must be at least 1");
  require(!requests.empty(), "offline_opt_kserver: no requests");
  const int T = static_cast<int>(requests.size());
  const Point origin = Point::zeros(requests.front().dim());
  const int super_src = 0, src = 1, sink = 2 + 2 * T, super_sink = 3 + 2 * T;
  auto out_node = [](int t) { return 2 + 2 * t; };
  auto in_node = [](int t) { return 3 + 2 * t; };

  MinCostFlow<double> g(4 + 2 * T);
  g.add_arc(super_src, src, k, 0.0);
  g.add_arc(src, sink, k, 0.0);
  for (int t = 0; t < T; ++t) {
    const auto& r = requests[static_cast<std::size_t>(t)];
    g.add_arc(super_src, out_node(t), 1, 0.0);
    g.add_arc(src, in_node(t), 1, distance(origin, r, m));
    g.add_arc(in_node(t), super_sink, 1, 0.0);
    g.add_arc(out_node(t), sink, 1, 0.0);
    for (int u = t + 1; u < T; ++u)
      g.add_arc(out_node(t), in_node(u), 1, distance(r, requests[static_cast<std::size_t>(u)], m));
  }
  g.add_arc(sink, super_sink, k, 0.0);
  const auto res = g.solve(super_src, super_sink, k + T);
  ensure(res.flow == k + T, "offline k-server network is infeasible");
  return res.cost;
}

struct TrajectoryOptimum {
  double cost = 0.0;
  TrajectorySet witness;
};

inline bool trajectory_bruteforce_allowed(std::size_t T, int k) {
  if (k == 1) return T <= 400;
  return k >= 2 && k <= 3 && T <= 8;
}

/// Exact best k-trajectory cost with predictions restricted to
/// {origin} U {S_1..S_T}. Enumerates day-to-trajectory assignments as
/// restricted growth strings (trajectory labels are interchangeable) and
/// places each trajectory optimally by dynamic programming over the
/// candidates. Caps: k <= 3 and T <= 8, or k == 1 and T <= 400.
inline TrajectoryOptimum brute_force_best_trajectories(std::span<const Point> solutions, int k, Metric m) {
  require(!solutions.empty(), "brute_force_best_trajectories: no days");
  require(k >= 1, "brute_force_best_trajectories: k must be at least 1");
  const std::size_t T = solutions.size();
  if (!trajectory_bruteforce_allowed(T, k)) {
    throw CapExceeded("trajectory brute force capped at k <= 3, T <= 8 (or k = 1, T <= 400); got k = " +
                      std::to_string(k) + ", T = " + std::to_string(T));
  }
  const std::size_t dim = solutions.front().dim();
  std::vector<Point> cand{Point::zeros(dim)};
  cand.insert(cand.end(), solutions.begin(), solutions.end());
  const std::size_t C = cand.size();
  std::vector<std::vector<double>> dc(C, std::vector<double>(C)), hit(C, std::vector<double>(T));
  for (std::size_t a = 0; a < C; ++a) {
    for (std::size_t b = 0; b < C; ++b) dc[a][b] = distance(cand[a], cand[b], m);
    for (std::size_t t = 0; t < T; ++t) hit[a][t] = distance(cand[a], solutions[t], m);
  }

  // Cost of one trajectory over `days`; fills `place` with candidate ids when given.
  auto place_one = [&](const std::vector<std::size_t>& days, std::vector<std::size_t>* place) {
    if (days.empty()) return 0.0;
    const std::size_t L = days.size();
    std::vector<std::vector<double>> f(L, std::vector<double>(C));
    std::vector<std::vector<std::size_t>> back(L, std::vector<std::size_t>(C, 0));
    for (std::size_t c = 0; c < C; ++c) f[0][c] = dc[0][c] + hit[c][days[0]];
    for (std::size_t l = 1; l < L; ++l) {
      for (std::size_t c = 0; c < C; ++c) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < C; ++p) {
          const double v = f[l - 1][p] + dc[p][c];
          if (v < best) {
            best = v;
            back[l][c] = p;
          }
        }
        f[l][c] = best + hit[c][days[l]];
      }
    }
    std::size_t arg = 0;
    for (std::size_t c = 1; c < C; ++c)
      if (f[L - 1][c] < f[L - 1][arg]) arg = c;
    const double cost = f[L - 1][arg];
    if (place) {
      place->assign(L, 0);
      for (std::size_t l = L; l-- > 0;) {
        (*place)[l] = arg;
        if (l > 0) arg = back[l][arg];
      }
    }
    return cost;
  };

  auto assignment_cost = [&](const std::vector<int>& assign, TrajectorySet* witness) {
    double total = 0.0;
    if (witness) {
      witness->k = k;
      witness->assignment = assign;
      witness->predictions.assign(T, cand[0]);
    }
    for (int q = 0; q < k; ++q) {
      std::vector<std::size_t> days;
      for (std::size_t t = 0; t < T; ++t)
        if (assign[t] == q) days.push_back(t);
      std::vector<std::size_t> place;
      total += place_one(days, witness ? &place : nullptr);
      if (witness)
        for (std::size_t l = 0; l < days.size(); ++l) witness->predictions[days[l]] = cand[place[l]];
    }
    return total;
  };

  // restricted growth strings: assign[t] <= 1 + max(assign[0..t-1]), < k
  auto next_assignment = [&](std::vector<int>& a) {
    for (std::size_t pos = a.size(); pos-- > 1;) {
      const int mx = *std::max_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(pos));
      if (a[pos] < std::min(k - 1, mx + 1)) {
        ++a[pos];
        std::fill(a.begin() + static_cast<std::ptrdiff_t>(pos) + 1, a.end(), 0);
        return true;
      }
    }
    return false;
  };

  std::vector<int> assign(T, 0), best_assign = assign;
  double best = assignment_cost(assign, nullptr);
  while (next_assignment(assign)) {
    const double c = assignment_cost(assign, nullptr);
    if (strictly_better(c, best)) {
      best = c;
      best_assign = assign;
    }
  }
  TrajectoryOptimum out;
  out.cost = assignment_cost(best_assign, &out.witness);
  return out;
}

// ---------------------------------------------------------------------------
// Work function algorithm

/// Work-function table over configurations (multisets of k point ids drawn
/// from the origin and the distinct requests seen so far). Point 0 is the
/// origin; every server starts there.
class WorkFunctionState {
 public:
  static constexpr int kMaxServers = 3;
  static constexpr std::size_t kMaxSeenPoints = 12;

  using Config = std::vector<int>;  // sorted point ids, size k

  WorkFunctionState(int k, std::size_t dim, Metric m) : k_(k), metric_(m) {
    require(k >= 1 && k <= kMaxServers, "work function algorithm supports 1 <= k <= 3");
    points_.push_back(Point::zeros(dim));
    servers_.assign(static_cast<std::size_t>(k), 0);
    table_[Config(static_cast<std::size_t>(k), 0)] = 0.0;
  }

  int k() const { return k_; }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<int>& servers() const { return servers_; }
  const std::map<Config, double>& table() const { return table_; }
  std::size_t requests_served() const { return served_; }
  long long work_units() const { return work_; }

  /// True when serving `r` would need a new point beyond the cap.
  bool would_exceed_cap(const Point& r) const {
    return find_point(r) < 0 && points_.size() - 1 >= kMaxSeenPoints;
  }

  /// Matching distance between two configurations (min over bijections).
  double config_distance(const Config& a, const Config& b) const {
    std::vector<int> perm(b);
    std::sort(perm.begin(), perm.end());
    double best = std::numeric_limits<double>::infinity();
    do {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += pd(a[i], perm[i]);
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }

  double value(const Config& x) const {
    Config key = x;
    std::sort(key.begin(), key.end());
    return table_.at(key);
  }

  struct Move {
    int server = 0;
    double movement = 0.0;
  };

  /// Serves one request: w_t(X) = min_{x in X} w_{t-1}(X - x + r) + d(x, r),
  /// then moves the server a minimizing w_t(A - a + r) + d(a, r) (lowest
  /// server index on ties).
  Move serve(const Point& r) {
    if (would_exceed_cap(r)) throw CapExceeded("work function state: more than 12 distinct points");
    int ri = find_point(r);
    if (ri < 0) ri = add_point(r);

    std::map<Config, double> next;
    for (const auto& [x, _] : table_) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < x.size(); ++i) {
        Config y = x;
        y[i] = ri;
        std::sort(y.begin(), y.end());
        best = std::min(best, table_.at(y) + pd(x[i], ri));
        ++work_;
      }
      next[x] = best;
    }
    table_ = std::move(next);

    Move mv{0, std::numeric_limits<double>::infinity()};
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < servers_.size(); ++s) {
      Config y = servers_;
      y[s] = ri;
      const double v = value(y) + pd(servers_[s], ri);
      ++work_;
      if (strictly_better(v, best)) {
        best = v;
        mv = Move{static_cast<int>(s), pd(servers_[s], ri)};
      }
    }
    servers_[static_cast<std::size_t>(mv.server)] = ri;
    ++served_;
    return mv;
  }

 private:
  double pd(int a, int b) const { return dist_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }

  int find_point(const Point& p) const {
    for (std::size_t i = 0; i < points_.size(); ++i)
      if (points_[i] == p) return static_cast<int>(i);
    return -1;
  }

  // Extends the current work function to every configuration that uses the
  // new point: w(X) = min_Y w(Y) + D(Y, X) over the existing table. Exact,
  // since optimal schedules only ever visit requested points.
  int add_point(const Point& p) {
    points_.push_back(p);
    const int id = static_cast<int>(points_.size()) - 1;
    dist_.assign(points_.size(), std::vector<double>(points_.size()));
    for (std::size_t a = 0; a < points_.size(); ++a)
      for (std::size_t b = 0; b < points_.size(); ++b) dist_[a][b] = distance(points_[a], points_[b], metric_);

    std::map<Config, double> added;
    for_each_config([&](const Config& x) {
      if (std::find(x.begin(), x.end(), id) == x.end()) return;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [y, w] : table_) {
        best = std::min(best, w + config_distance(y, x));
        ++work_;
      }
      added[x] = best;
    });
    table_.insert(added.begin(), added.end());
    return id;
  }

  template <typename F>
  void for_each_config(F&& f) const {
    const int n = static_cast<int>(points_.size());
    Config x(static_cast<std::size_t>(k_), 0);
    while (true) {
      f(x);
      int pos = k_ - 1;
      while (pos >= 0 && x[static_cast<std::size_t>(pos)] == n - 1) --pos;
      if (pos < 0) break;
      const int v = x[static_cast<std::size_t>(pos)] + 1;
      for (int j = pos; j < k_; ++j) x[static_cast<std::size_t>(j)] = v;
    }
  }

  int k_;
  Metric metric_;
  std::vector<Point> points_;
  std::vector<std::vector<double>> dist_{{0.0}};
  std::vector<int> servers_;  // point id per server, in server order
  std::map<Config, double> table_;
  std::size_t served_ = 0;
  long long work_ = 0;
};

inline WorkFunctionState::Move wfa_step(WorkFunctionState& state, const Point& request) {
  return state.serve(request);
}

}  // namespace warmstart
