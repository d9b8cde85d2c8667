#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "warmstart/errors.hpp"
#include "warmstart/metric.hpp"
#include "warmstart/oracle.hpp"

namespace warmstart {

struct CenterSet {
  std::vector<Point> centers;

  std::size_t k() const { return centers.size(); }
  bool operator==(const CenterSet&) const = default;
};

inline void require_samples(std::span<const Point> xs) {
  require(!xs.empty(), "sample set must be nonempty");
  for (const auto& x : xs) require_same_dim(x, xs.front());
}

/// (1/m) * sum over samples of the distance to the nearest center.
inline double cost_of_centers(std::span<const Point> centers, std::span<const Point> xs, Metric m) {
  require_samples(xs);
  require(!centers.empty(), "center set must be nonempty");
  double total = 0.0;
  for (const auto& x : xs) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : centers) best = std::min(best, distance(c, x, m));
    total += best;
  }
  return total / static_cast<double>(xs.size());
}

inline double cost_of_centers(const CenterSet& c, std::span<const Point> xs, Metric m) {
  return cost_of_centers(std::span<const Point>(c.centers), xs, m);
}

// Relative slack under which two costs count as tied.
inline bool strictly_better(double candidate, double incumbent) {
  if (std::isinf(incumbent)) return candidate < incumbent;
  return candidate < incumbent - 1e-12 * std::max(1.0, std::abs(incumbent));
}

namespace detail {

inline double lower_median(std::vector<double> v) {
  const std::size_t mid = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  return v[mid];
}

inline double sum_distances(const Point& c, std::span<const Point> xs, Metric m) {
  double s = 0.0;
  for (const auto& x : xs) s += distance(c, x, m);
  return s;
}

// Weiszfeld iteration for the L2 geometric median. Returns the best of the
// iterate and the sample points, which covers the case where the median
// sits on a sample and the iteration stalls.
inline Point geometric_median(std::span<const Point> xs, double tol = 1e-9, int max_iters = 1000) {
  const std::size_t d = xs.front().dim();
  const Metric l2{Norm::L2};
  std::vector<double> y(d, 0.0);
  for (const auto& x : xs)
    for (std::size_t j = 0; j < d; ++j) y[j] += x[j];
  for (auto& v : y) v /= static_cast<double>(xs.size());

  for (int it = 0; it < max_iters; ++it) {
    std::vector<double> num(d, 0.0);
    double den = 0.0;
    const Point cur(y);
    for (const auto& x : xs) {
      const double w = 1.0 / std::max(distance(cur, x, l2), 1e-12);
      for (std::size_t j = 0; j < d; ++j) num[j] += w * x[j];
      den += w;
    }
    double shift = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      num[j] /= den;
      shift += (num[j] - y[j]) * (num[j] - y[j]);
    }
    y = std::move(num);
    if (std::sqrt(shift) <= tol) break;
  }

  Point best(y);
  double best_cost = sum_distances(best, xs, l2);
  for (const auto& x : xs) {
    const double c = sum_distances(x, xs, l2);
    if (strictly_better(c, best_cost)) {
      best = x;
      best_cost = c;
    }
  }
  return best;
}

}  // namespace detail

/// Empirical 1-median: coordinate-wise lower median (L1), Weiszfeld
/// geometric median (L2), per-coordinate midpoint of extremes (Linf).
inline Point one_median(std::span<const Point> xs, Metric m) {
  require_samples(xs);
  const std::size_t d = xs.front().dim();
  std::vector<double> out(d);
  switch (m.norm) {
    case Norm::L1:
      for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> col;
        col.reserve(xs.size());
        for (const auto& x : xs) col.push_back(x[j]);
        out[j] = detail::lower_median(std::move(col));
      }
      return Point(std::move(out));
    case Norm::L2:
      return detail::geometric_median(xs);
    case Norm::Linf:
      for (std::size_t j = 0; j < d; ++j) {
        double lo = xs.front()[j], hi = xs.front()[j];
        for (const auto& x : xs) {
          lo = std::min(lo, x[j]);
          hi = std::max(hi, x[j]);
        }
        out[j] = lo + (hi - lo) / 2.0;
      }
      return Point(std::move(out));
  }
  return Point::zeros(d);
}

/// C(n, k), saturating at `cap + 1` so callers can test against a cap
/// without overflow.
inline unsigned long long binomial_capped(std::size_t n, std::size_t k, unsigned long long cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned long long r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i stays integral at every step; r <= cap here
    const unsigned long long num = n - k + i;
    r = r * num / i;
    if (r > cap) return cap + 1;
  }
  return r;
}

inline constexpr unsigned long long kSubsetEnumerationCap = 1'000'000;

struct LearnedCenters {
  CenterSet centers;
  std::vector<std::size_t> indices;  // positions in the sample set
  double cost = 0.0;
};

namespace detail {

inline std::vector<std::vector<double>> pairwise(std::span<const Point> xs, Metric m) {
  std::vector<std::vector<double>> d(xs.size(), std::vector<double>(xs.size(), 0.0));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) d[i][j] = distance(xs[i], xs[j], m);
  return d;
}

inline double subset_cost(const std::vector<std::vector<double>>& d, std::span<const std::size_t> idx) {
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c : idx) best = std::min(best, d[c][i]);
    total += best;
  }
  return total / static_cast<double>(d.size());
}

inline LearnedCenters make_learned(std::span<const Point> xs, std::vector<std::size_t> idx, double cost) {
  LearnedCenters out;
  for (std::size_t i : idx) out.centers.centers.push_back(xs[i]);
  out.indices = std::move(idx);
  out.cost = cost;
  return out;
}

}  // namespace detail

/// Exact k-medians restricted to sample points: scans every k-subset of
/// the samples in lexicographic index order and keeps the first minimum.
/// Refuses when C(m, k) exceeds kSubsetEnumerationCap.
inline LearnedCenters learn_centers_subset_erm(std::span<const Point> xs, std::size_t k, Metric m) {
  require_samples(xs);
  require(k >= 1, "k must be at least 1");
  require(k <= xs.size(), "k = " + std::to_string(k) + " exceeds sample count " + std::to_string(xs.size()));
  if (binomial_capped(xs.size(), k, kSubsetEnumerationCap) > kSubsetEnumerationCap) {
    throw CapExceeded("subset enumeration C(" + std::to_string(xs.size()) + ", " + std::to_string(k) +
                      ") exceeds cap; use local search");
  }
  const auto d = detail::pairwise(xs, m);
  const std::size_t n = xs.size();

  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::vector<std::size_t> best_idx = idx;
  double best = detail::subset_cost(d, idx);
  while (true) {
    // next combination in lexicographic order
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + (pos - 1)) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
    const double c = detail::subset_cost(d, idx);
    if (strictly_better(c, best)) {
      best = c;
      best_idx = idx;
    }
  }
  return detail::make_learned(xs, std::move(best_idx), best);
}

/// Single-swap local search over sample points, starting from the first k
/// samples. Each sweep applies the best strictly improving swap (first in
/// scan order on ties); stops when none improves or after max_sweeps.
inline LearnedCenters learn_centers_local_search(std::span<const Point> xs, std::size_t k, Metric m,
                                                 int max_sweeps = 100) {
  require_samples(xs);
  require(k >= 1, "k must be at least 1");
  require(k <= xs.size(), "k = " + std::to_string(k) + " exceeds sample count " + std::to_string(xs.size()));
  const auto d = detail::pairwise(xs, m);
  const std::size_t n = xs.size();

  std::vector<std::size_t> idx(k);
  std::vector<bool> chosen(n, false);
  for (std::size_t i = 0; i < k; ++i) {
    idx[i] = i;
    chosen[i] = true;
  }
  double cost = detail::subset_cost(d, idx);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double best = cost;
    std::size_t best_pos = k, best_in = n;
    for (std::size_t pos = 0; pos < k; ++pos) {
      const std::size_t out = idx[pos];
      for (std::size_t in = 0; in < n; ++in) {
        if (chosen[in]) continue;
        idx[pos] = in;
        const double c = detail::subset_cost(d, idx);
        if (strictly_better(c, best)) {
          best = c;
          best_pos = pos;
          best_in = in;
        }
      }
      idx[pos] = out;
    }
    if (best_pos == k) break;
    chosen[idx[best_pos]] = false;
    chosen[best_in] = true;
    idx[best_pos] = best_in;
    cost = best;
  }
  return detail::make_learned(xs, std::move(idx), cost);
}

/// Subset ERM when the enumeration fits under the cap, local search otherwise.
inline LearnedCenters learn_centers(std::span<const Point> xs, std::size_t k, Metric m) {
  if (binomial_capped(xs.size(), k, kSubsetEnumerationCap) <= kSubsetEnumerationCap)
    return learn_centers_subset_erm(xs, k, m);
  return learn_centers_local_search(xs, k, m);
}

inline ParallelResult solve_with_learned_centers(const HiddenInstance& inst, const CenterSet& c) {
  return run_parallel_k(inst, c.centers);
}

}  // namespace warmstart
