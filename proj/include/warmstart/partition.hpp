#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "warmstart/errors.hpp"
#include "warmstart/kmedians.hpp"
#include "warmstart/metric.hpp"
#include "warmstart/oracle.hpp"

namespace warmstart {

struct LabeledSample {
  Point features;
  Point solution;

  bool operator==(const LabeledSample&) const = default;
};

/// Axis-aligned threshold tree mapping a feature point to a label in
/// [0, k). Node 0 is the root; a node with feature < 0 is a leaf.
/// Samples with x[feature] <= threshold go left.
struct PartitionHypothesis {
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;

    bool operator==(const Node&) const = default;
  };

  std::vector<Node> nodes;
  int k = 1;
  long long eval_work = 1;

  static PartitionHypothesis constant(int k, int label = 0, long long eval_work = 1) {
    PartitionHypothesis h;
    h.k = k;
    h.eval_work = eval_work;
    h.nodes.push_back(Node{-1, 0.0, -1, -1, label});
    h.validate();
    return h;
  }

  static PartitionHypothesis stump(int k, int feature, double threshold, int left_label, int right_label,
                                   long long eval_work = 1) {
    PartitionHypothesis h;
    h.k = k;
    h.eval_work = eval_work;
    h.nodes = {Node{feature, threshold, 1, 2, 0}, Node{-1, 0.0, -1, -1, left_label},
               Node{-1, 0.0, -1, -1, right_label}};
    h.validate();
    return h;
  }

  int operator()(const Point& x) const {
    int n = 0;
    while (nodes[n].feature >= 0) {
      const auto f = static_cast<std::size_t>(nodes[n].feature);
      require(f < x.dim(), "hypothesis reads feature " + std::to_string(f) + " of a " +
                               std::to_string(x.dim()) + "-dim point");
      n = x[f] <= nodes[n].threshold ? nodes[n].left : nodes[n].right;
    }
    return nodes[n].label;
  }

  int depth() const { return depth_of(0); }

  void validate() const {
    require(k >= 1, "hypothesis k must be positive");
    require(eval_work >= 1, "hypothesis eval_work must be at least 1");
    require(!nodes.empty(), "hypothesis has no nodes");
    for (const auto& n : nodes) {
      if (n.feature < 0) {
        require(n.label >= 0 && n.label < k, "leaf label out of range");
      } else {
        const int sz = static_cast<int>(nodes.size());
        require(n.left > 0 && n.left < sz && n.right > 0 && n.right < sz, "dangling tree child");
      }
    }
  }

  bool operator==(const PartitionHypothesis&) const = default;

 private:
  int depth_of(int n) const {
    if (nodes[n].feature < 0) return 0;
    return 1 + std::max(depth_of(nodes[n].left), depth_of(nodes[n].right));
  }
};

using HypothesisClass = std::vector<PartitionHypothesis>;

/// A relabeling [0, k) -> [0, k); need not be a bijection.
struct Rotation {
  std::vector<int> map;

  static Rotation identity(int k) {
    Rotation r;
    for (int i = 0; i < k; ++i) r.map.push_back(i);
    return r;
  }

  int k() const { return static_cast<int>(map.size()); }
  int operator()(int label) const { return map[static_cast<std::size_t>(label)]; }
  bool is_identity() const {
    for (int i = 0; i < k(); ++i)
      if (map[static_cast<std::size_t>(i)] != i) return false;
    return true;
  }

  bool operator==(const Rotation&) const = default;
};

/// phi(C)[i] = C[phi(i)].
inline CenterSet permute_centers(const Rotation& phi, const CenterSet& c) {
  require(static_cast<std::size_t>(phi.k()) == c.k(), "rotation and center set disagree on k");
  CenterSet out;
  for (int i = 0; i < phi.k(); ++i) out.centers.push_back(c.centers[static_cast<std::size_t>(phi(i))]);
  return out;
}

/// phi o h, realized by relabeling the leaves.
inline PartitionHypothesis rotated(const PartitionHypothesis& h, const Rotation& phi) {
  require(phi.k() == h.k, "rotation and hypothesis disagree on k");
  PartitionHypothesis out = h;
  for (auto& n : out.nodes)
    if (n.feature < 0) n.label = phi(n.label);
  return out;
}

inline void require_data(std::span<const LabeledSample> data) {
  require(!data.empty(), "labeled sample set must be nonempty");
  for (const auto& s : data) {
    require_same_dim(s.features, data.front().features);
    require_same_dim(s.solution, data.front().solution);
  }
}

/// Mean distance from each solution to C[phi(h(features))].
inline double c_loss(const PartitionHypothesis& h, const Rotation& phi, const CenterSet& c,
                     std::span<const LabeledSample> data, Metric m) {
  require_data(data);
  require(static_cast<std::size_t>(h.k) == c.k() && phi.k() == h.k, "c_loss: k mismatch");
  double total = 0.0;
  for (const auto& s : data) total += distance(s.solution, c.centers[static_cast<std::size_t>(phi(h(s.features)))], m);
  return total / static_cast<double>(data.size());
}

inline double c_loss(const PartitionHypothesis& h, const CenterSet& c, std::span<const LabeledSample> data,
                     Metric m) {
  return c_loss(h, Rotation::identity(h.k), c, data, m);
}

struct PartitionCost {
  double cost = 0.0;
  CenterSet centers;  // empirical 1-median per label; origin for empty labels
};

inline PartitionCost cost_of_partition(const PartitionHypothesis& h, std::span<const LabeledSample> data,
                                       Metric m) {
  require_data(data);
  std::vector<std::vector<Point>> groups(static_cast<std::size_t>(h.k));
  std::vector<int> labels;
  labels.reserve(data.size());
  for (const auto& s : data) {
    labels.push_back(h(s.features));
    groups[static_cast<std::size_t>(labels.back())].push_back(s.solution);
  }
  PartitionCost out;
  const std::size_t dim = data.front().solution.dim();
  for (const auto& g : groups) out.centers.centers.push_back(g.empty() ? Point::zeros(dim) : one_median(g, m));
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    total += distance(data[i].solution, out.centers.centers[static_cast<std::size_t>(labels[i])], m);
  out.cost = total / static_cast<double>(data.size());
  return out;
}

/// phi(i) = index of the center in C nearest to partition i's best center
/// (lowest index on ties).
inline Rotation construct_rotation(const CenterSet& partition_centers, const CenterSet& c, Metric m) {
  require(partition_centers.k() == c.k(), "construct_rotation: k mismatch");
  Rotation phi;
  for (const auto& ch : partition_centers.centers) {
    std::size_t best = 0;
    double best_d = distance(c.centers[0], ch, m);
    for (std::size_t j = 1; j < c.k(); ++j) {
      const double d = distance(c.centers[j], ch, m);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    phi.map.push_back(static_cast<int>(best));
  }
  return phi;
}

inline Rotation construct_rotation(const PartitionHypothesis& h, const CenterSet& c,
                                   std::span<const LabeledSample> data, Metric m) {
  return construct_rotation(cost_of_partition(h, data, m).centers, c, m);
}

// ---------------------------------------------------------------------------
// Hypothesis enumeration and ERM

/// Midpoints between consecutive distinct values of each feature.
inline std::vector<std::vector<double>> candidate_thresholds(std::span<const LabeledSample> data) {
  require_data(data);
  const std::size_t p = data.front().features.dim();
  std::vector<std::vector<double>> out(p);
  for (std::size_t f = 0; f < p; ++f) {
    std::vector<double> v;
    for (const auto& s : data) v.push_back(s.features[f]);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    for (std::size_t i = 0; i + 1 < v.size(); ++i) out[f].push_back(v[i] + (v[i + 1] - v[i]) / 2.0);
  }
  return out;
}

/// Depth <= max_depth (0, 1 or 2) threshold trees over the candidate
/// thresholds of `data`, in canonical order: the constant, then stumps
/// (feature-major, threshold ascending), then depth-2 trees. Leaves are
/// labeled left to right cyclically 0, 1, ..., k-1; other labelings are
/// reached through rotations. For k == 1 only the constant is emitted.
inline HypothesisClass enumerate_threshold_trees(std::span<const LabeledSample> data, int k, int max_depth,
                                                 long long eval_work = 1) {
  require(k >= 1, "k must be positive");
  require(max_depth >= 0 && max_depth <= 2, "max_depth must be 0, 1 or 2");
  HypothesisClass out;
  out.push_back(PartitionHypothesis::constant(k, 0, eval_work));
  if (k == 1 || max_depth == 0) return out;

  const auto thr = candidate_thresholds(data);
  struct Split {
    int feature;
    double threshold;
  };
  std::vector<Split> splits;
  for (std::size_t f = 0; f < thr.size(); ++f)
    for (double t : thr[f]) splits.push_back({static_cast<int>(f), t});

  for (const auto& s : splits) out.push_back(PartitionHypothesis::stump(k, s.feature, s.threshold, 0, 1 % k, eval_work));
  if (max_depth == 1) return out;

  using Node = PartitionHypothesis::Node;
  // child option -1 is a leaf, otherwise an index into splits
  const int n_opt = static_cast<int>(splits.size());
  for (const auto& root : splits) {
    for (int lo = -1; lo < n_opt; ++lo) {
      for (int ro = -1; ro < n_opt; ++ro) {
        if (lo < 0 && ro < 0) continue;
        PartitionHypothesis h;
        h.k = k;
        h.eval_work = eval_work;
        h.nodes.push_back(Node{root.feature, root.threshold, -1, -1, 0});
        int next_label = 0;
        auto leaf = [&] {
          h.nodes.push_back(Node{-1, 0.0, -1, -1, next_label});
          next_label = (next_label + 1) % k;
          return static_cast<int>(h.nodes.size()) - 1;
        };
        auto child = [&](int opt) {
          if (opt < 0) return leaf();
          const auto& s = splits[static_cast<std::size_t>(opt)];
          h.nodes.push_back(Node{s.feature, s.threshold, -1, -1, 0});
          const int id = static_cast<int>(h.nodes.size()) - 1;
          const int l = leaf();
          const int r = leaf();
          h.nodes[static_cast<std::size_t>(id)].left = l;
          h.nodes[static_cast<std::size_t>(id)].right = r;
          return id;
        };
        const int l = child(lo);
        const int r = child(ro);
        h.nodes[0].left = l;
        h.nodes[0].right = r;
        out.push_back(std::move(h));
      }
    }
  }
  return out;
}

struct ErmResult {
  PartitionHypothesis hypothesis;
  std::size_t index = 0;  // position in the class
  double loss = 0.0;
};

namespace detail {

// labels[h][s] = class[h](data[s].features)
inline std::vector<std::vector<int>> label_table(const HypothesisClass& cls, std::span<const LabeledSample> data) {
  std::vector<std::vector<int>> out(cls.size());
  for (std::size_t h = 0; h < cls.size(); ++h) {
    out[h].reserve(data.size());
    for (const auto& s : data) out[h].push_back(cls[h](s.features));
  }
  return out;
}

inline ErmResult erm_with_labels(const HypothesisClass& cls, const std::vector<std::vector<int>>& labels,
                                 const CenterSet& c, std::span<const LabeledSample> data, Metric m) {
  std::vector<std::vector<double>> loss(data.size());
  for (std::size_t s = 0; s < data.size(); ++s)
    for (const auto& center : c.centers) loss[s].push_back(distance(data[s].solution, center, m));

  std::size_t best = 0;
  double best_loss = 0.0;
  for (std::size_t h = 0; h < cls.size(); ++h) {
    double total = 0.0;
    for (std::size_t s = 0; s < data.size(); ++s) total += loss[s][static_cast<std::size_t>(labels[h][s])];
    const double l = total / static_cast<double>(data.size());
    if (h == 0 || strictly_better(l, best_loss)) {
      best = h;
      best_loss = l;
    }
  }
  return ErmResult{cls[best], best, best_loss};
}

inline void require_class(const HypothesisClass& cls, const CenterSet& c) {
  require(!cls.empty(), "hypothesis class is empty");
  for (const auto& h : cls) {
    h.validate();
    require(static_cast<std::size_t>(h.k) == c.k(), "hypothesis k differs from the number of centers");
  }
}

}  // namespace detail

/// Exact empirical C-loss minimizer over the class (identity rotation);
/// earliest hypothesis in class order wins ties.
inline ErmResult erm_partition(const HypothesisClass& cls, const CenterSet& c, std::span<const LabeledSample> data,
                               Metric m) {
  require_data(data);
  detail::require_class(cls, c);
  return detail::erm_with_labels(cls, detail::label_table(cls, data), c, data, m);
}

inline constexpr int kMaxRotationK = 4;

/// All k^k maps [0,k) -> [0,k): identity first, then lexicographic order.
inline std::vector<Rotation> all_rotations(int k) {
  require(k >= 1 && k <= kMaxRotationK, "rotation enumeration needs 1 <= k <= " + std::to_string(kMaxRotationK));
  std::vector<Rotation> out{Rotation::identity(k)};
  std::vector<int> cur(static_cast<std::size_t>(k), 0);
  while (true) {
    Rotation r{cur};
    if (!r.is_identity()) out.push_back(r);
    int pos = k - 1;
    while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == k - 1) cur[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
    ++cur[static_cast<std::size_t>(pos)];
  }
  return out;
}

struct RcErmResult {
  PartitionHypothesis hypothesis;
  std::size_t index = 0;
  Rotation rotation;
  double loss = 0.0;  // c_loss(h, rotation, C)
};

/// ERM over the rotational completion of the class using k^k calls to the
/// plain ERM, one per rotation phi with centers phi(C).
inline RcErmResult rc_erm(const HypothesisClass& cls, const CenterSet& c, std::span<const LabeledSample> data,
                          Metric m) {
  require_data(data);
  detail::require_class(cls, c);
  const auto rotations = all_rotations(static_cast<int>(c.k()));
  const auto labels = detail::label_table(cls, data);
  RcErmResult best;
  bool have = false;
  for (const auto& phi : rotations) {
    auto r = detail::erm_with_labels(cls, labels, permute_centers(phi, c), data, m);
    if (!have || strictly_better(r.loss, best.loss)) {
      best = RcErmResult{std::move(r.hypothesis), r.index, phi, r.loss};
      have = true;
    }
  }
  return best;
}

struct TwoStepResult {
  PartitionHypothesis hypothesis;
  Rotation rotation;
  CenterSet partition_centers;  // indexed by rotation(hypothesis(x))
  CenterSet learned_centers;    // step-1 k-medians centers
  double step2_loss = 0.0;      // c_loss(h, rotation, learned_centers)
  double final_cost = 0.0;      // cost_of_partition(rotation o h)
};

/// k-medians centers from the training solutions, rc-ERM against them,
/// then per-partition 1-medians for the chosen rotated hypothesis.
inline TwoStepResult two_step_learn(const HypothesisClass& cls, std::span<const LabeledSample> train, int k,
                                    Metric m) {
  require_data(train);
  require(k >= 1, "k must be positive");
  std::vector<Point> sols;
  for (const auto& s : train) sols.push_back(s.solution);
  TwoStepResult out;
  out.learned_centers = learn_centers(sols, static_cast<std::size_t>(k), m).centers;
  auto rc = rc_erm(cls, out.learned_centers, train, m);
  out.hypothesis = std::move(rc.hypothesis);
  out.rotation = std::move(rc.rotation);
  out.step2_loss = rc.loss;
  auto pc = cost_of_partition(rotated(out.hypothesis, out.rotation), train, m);
  out.partition_centers = std::move(pc.centers);
  out.final_cost = pc.cost;
  return out;
}

struct PredictResult {
  Point solution;
  long long total_cost = 0;  // eval_work + radius of the single thread
  long long radius = 0;
  int label = 0;
};

/// Evaluates the hypothesis once and runs a single thread from the routed
/// center.
inline PredictResult predict_and_solve(const PartitionHypothesis& h, const Rotation& phi,
                                       const CenterSet& partition_centers, const HiddenInstance& inst) {
  require(phi.k() == h.k && partition_centers.k() == static_cast<std::size_t>(h.k), "predict_and_solve: k mismatch");
  const int label = phi(h(inst.features()));
  SearchThread t(inst, partition_centers.centers[static_cast<std::size_t>(label)]);
  const long long r = t.run_to_completion();
  return PredictResult{t.reveal(), h.eval_work + r, r, label};
}

}  // namespace warmstart
