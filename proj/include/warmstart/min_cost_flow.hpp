#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "warmstart/errors.hpp"

namespace warmstart {

// Successive shortest paths with Johnson potentials. Initial potentials
// come from a DAG pass, so every arc must go from a lower to a higher node
// id; negative arc costs are then allowed. Dijkstra runs on reduced costs.
template <typename Cost>
class MinCostFlow {
 public:
  struct Arc {
    int to;
    int rev;
    long long cap;
    Cost cost;
  };

  struct Result {
    long long flow = 0;
    Cost cost = 0;
  };

  explicit MinCostFlow(int n) : graph_(static_cast<std::size_t>(n)) {}

  int node_count() const { return static_cast<int>(graph_.size()); }

  void add_arc(int from, int to, long long cap, Cost cost) {
    require(from < to, "MinCostFlow: arcs must respect node order (acyclic input)");
    auto& gf = graph_[static_cast<std::size_t>(from)];
    auto& gt = graph_[static_cast<std::size_t>(to)];
    gf.push_back(Arc{to, static_cast<int>(gt.size()), cap, cost});
    gt.push_back(Arc{from, static_cast<int>(gf.size()) - 1, 0, -cost});
  }

  /// Sends up to max_flow units from source to sink at minimum cost.
  Result solve(int source, int sink, long long max_flow) {
    const std::size_t n = graph_.size();
    const Cost inf = std::numeric_limits<Cost>::max() / 4;
    std::vector<Cost> pot(n, inf);
    pot[static_cast<std::size_t>(source)] = 0;
    for (std::size_t u = 0; u < n; ++u) {
      if (pot[u] == inf) continue;
      for (const auto& a : graph_[u])
        if (a.cap > 0 && pot[u] + a.cost < pot[static_cast<std::size_t>(a.to)])
          pot[static_cast<std::size_t>(a.to)] = pot[u] + a.cost;
    }
    for (auto& p : pot)
      if (p == inf) p = 0;

    Result res;
    std::vector<Cost> dist(n);
    std::vector<int> prev_node(n), prev_arc(n);
    using Item = std::pair<Cost, int>;
    while (res.flow < max_flow) {
      std::fill(dist.begin(), dist.end(), inf);
      std::fill(prev_node.begin(), prev_node.end(), -1);
      dist[static_cast<std::size_t>(source)] = 0;
      std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
      pq.emplace(0, source);
      while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        const auto uu = static_cast<std::size_t>(u);
        if (d > dist[uu]) continue;
        for (std::size_t i = 0; i < graph_[uu].size(); ++i) {
          const auto& a = graph_[uu][i];
          if (a.cap <= 0) continue;
          const auto v = static_cast<std::size_t>(a.to);
          Cost rc = a.cost + pot[uu] - pot[v];
          if (rc < 0) rc = 0;  // roundoff only; potentials keep reduced costs nonnegative
          if (dist[uu] + rc < dist[v]) {
            dist[v] = dist[uu] + rc;
            prev_node[v] = u;
            prev_arc[v] = static_cast<int>(i);
            pq.emplace(dist[v], a.to);
          }
        }
      }
      if (dist[static_cast<std::size_t>(sink)] == inf) break;
      for (std::size_t v = 0; v < n; ++v)
        if (dist[v] < inf) pot[v] += dist[v];

      long long push = max_flow - res.flow;
      for (int v = sink; v != source; v = prev_node[static_cast<std::size_t>(v)]) {
        const auto& a = graph_[static_cast<std::size_t>(prev_node[static_cast<std::size_t>(v)])]
                              [static_cast<std::size_t>(prev_arc[static_cast<std::size_t>(v)])];
        push = std::min(push, a.cap);
      }
      for (int v = sink; v != source; v = prev_node[static_cast<std::size_t>(v)]) {
        auto& a = graph_[static_cast<std::size_t>(prev_node[static_cast<std::size_t>(v)])]
                        [static_cast<std::size_t>(prev_arc[static_cast<std::size_t>(v)])];
        a.cap -= push;
        graph_[static_cast<std::size_t>(v)][static_cast<std::size_t>(a.rev)].cap += push;
        res.cost += a.cost * static_cast<Cost>(push);
      }
      res.flow += push;
    }
    return res;
  }

 private:
  std::vector<std::vector<Arc>> graph_;
};

}  // namespace warmstart
