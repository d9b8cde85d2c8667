#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "warmstart/errors.hpp"

namespace warmstart {

/// A point in a real normed space. Coordinates are always finite.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) { validate(); }
  Point(std::initializer_list<double> coords) : coords_(coords) { validate(); }

  static Point zeros(std::size_t dim) { return Point(std::vector<double>(dim, 0.0)); }

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }

  bool operator==(const Point&) const = default;

 private:
  void validate() const {
    require(!coords_.empty(), "Point: dimension must be positive");
    for (double c : coords_) require(std::isfinite(c), "Point: coordinates must be finite");
  }

  std::vector<double> coords_;
};

enum class Norm { L1, L2, Linf };

inline std::string_view to_string(Norm n) {
  switch (n) {
    case Norm::L1: return "L1";
    case Norm::L2: return "L2";
    case Norm::Linf: return "Linf";
  }
  return "?";
}

inline Norm norm_from_string(std::string_view s) {
  if (s == "L1") return Norm::L1;
  if (s == "L2") return Norm::L2;
  if (s == "Linf") return Norm::Linf;
  throw UsageError("unknown norm '" + std::string(s) + "' (expected L1, L2 or Linf)");
}

struct Metric {
  Norm norm = Norm::L2;

  bool operator==(const Metric&) const = default;
};

inline void require_same_dim(const Point& u, const Point& v) {
  if (u.dim() != v.dim()) {
    throw UsageError("dimension mismatch: " + std::to_string(u.dim()) + " vs " +
                     std::to_string(v.dim()));
  }
}

// Coordinates are accumulated left to right; |u_i - v_i| is symmetric in
// IEEE arithmetic so distance(u, v) and distance(v, u) agree bitwise.
inline double distance(const Point& u, const Point& v, Metric m) {
  require_same_dim(u, v);
  const std::size_t n = u.dim();
  switch (m.norm) {
    case Norm::L1: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += std::abs(u[i] - v[i]);
      return s;
    }
    case Norm::L2: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = u[i] - v[i];
        s += d * d;
      }
      return std::sqrt(s);
    }
    case Norm::Linf: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s = std::max(s, std::abs(u[i] - v[i]));
      return s;
    }
  }
  return 0.0;
}

inline double norm_of(const Point& u, Metric m) { return distance(u, Point::zeros(u.dim()), m); }

// Distances this close to an integer are treated as that integer before the
// ceiling, so roundoff in a sum or sqrt cannot add a phantom step.
inline constexpr double kStepSnap = 1e-9;

/// Unit oracle steps a warm-start run needs from prediction `p` to reveal
/// `s`: max(1, ceil(distance)). The floor of 1 is the verification cost.
inline long long search_steps(const Point& p, const Point& s, Metric m) {
  const double d = distance(p, s, m);
  const double r = std::round(d);
  const double c = std::abs(d - r) <= kStepSnap ? r : std::ceil(d);
  return std::max(1LL, static_cast<long long>(c));
}

}  // namespace warmstart
