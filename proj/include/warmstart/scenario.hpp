#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "warmstart/errors.hpp"
#include "warmstart/metric.hpp"
#include "warmstart/oracle.hpp"
#include "warmstart/rng.hpp"
#include "warmstart/trajectory.hpp"

namespace warmstart {

struct ScenarioMeta {
  std::map<std::string, double> params;
  std::optional<TrajectorySet> planted;  // latent trajectory structure, when the generator has one
  double planted_cost = 0.0;             // generator's own accounting of the planted set

  bool operator==(const ScenarioMeta&) const = default;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  std::size_t dim = 1;
  std::size_t feature_dim = 1;
  Metric metric;
  double d_max = 0.0;
  ScenarioMeta meta;
  std::vector<HiddenInstance> days;

  std::size_t size() const { return days.size(); }
  std::vector<Point> solutions() const { return Hindsight::solutions(days); }

  bool operator==(const Scenario&) const = default;
};

/// Exact maximum pairwise distance between solutions.
inline double max_pairwise_distance(std::span<const Point> xs, Metric m) {
  double best = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) best = std::max(best, distance(xs[i], xs[j], m));
  return best;
}

namespace detail {

inline void finish(Scenario& s, const std::vector<Point>& features, const std::vector<Point>& solutions) {
  s.days.clear();
  for (std::size_t t = 0; t < solutions.size(); ++t)
    s.days.emplace_back(t + 1, features[t], solutions[t], s.metric);
  s.dim = solutions.front().dim();
  s.feature_dim = features.front().dim();
  s.d_max = max_pairwise_distance(solutions, s.metric);
}

// Uniform per coordinate in [-r/dim, r/dim]; any of the three norms of the
// result is at most r.
inline std::vector<double> box_noise(CounterRng& rng, std::size_t dim, double r) {
  std::vector<double> v(dim);
  const double h = r / static_cast<double>(dim);
  for (auto& x : v) x = rng.uniform(-h, h);
  return v;
}

inline Point add(const Point& p, const std::vector<double>& v) {
  std::vector<double> c(p.coords().begin(), p.coords().end());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += v[i];
  return Point(std::move(c));
}

inline void require_shape(std::size_t T, std::size_t dim) {
  require(T >= 1, "scenario needs T >= 1");
  require(dim >= 1, "scenario needs dim >= 1");
}

}  // namespace detail

/// k clusters whose centers sit sep apart along the first axis (jittered in
/// the others); each day picks a cluster uniformly and emits a solution
/// within `spread` of its center. Features are the solution shifted by
/// 0.1 * cluster index in every coordinate.
inline Scenario gen_static_clusters(std::uint64_t seed, int k, double sep, double spread, std::size_t T,
                                    std::size_t dim, Metric m = {}) {
  detail::require_shape(T, dim);
  require(k >= 1, "static clusters: k must be at least 1");
  require(sep > 0.0, "static clusters: sep must be positive");
  require(spread >= 0.0, "static clusters: spread must be nonnegative");
  CounterRng root(seed);
  CounterRng layout = root.split(1), pick = root.split(2), noise = root.split(3);

  std::vector<Point> centers;
  for (int c = 0; c < k; ++c) {
    std::vector<double> x(dim, 0.0);
    x[0] = static_cast<double>(c) * sep;
    for (std::size_t i = 1; i < dim; ++i) x[i] = layout.uniform(0.0, sep / 10.0);
    centers.emplace_back(std::move(x));
  }

  Scenario s;
  s.name = "static_clusters";
  s.seed = seed;
  s.metric = m;
  s.meta.params = {{"k", static_cast<double>(k)}, {"sep", sep}, {"spread", spread}, {"T", static_cast<double>(T)},
                   {"dim", static_cast<double>(dim)}};
  TrajectorySet planted;
  planted.k = k;
  std::vector<Point> features, solutions;
  std::vector<bool> used(static_cast<std::size_t>(k), false);
  double cost = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const auto c = static_cast<std::size_t>(pick.below(static_cast<std::uint64_t>(k)));
    Point sol = detail::add(centers[c], detail::box_noise(noise, dim, spread));
    features.push_back(detail::add(sol, std::vector<double>(dim, 0.1 * static_cast<double>(c))));
    if (!used[c]) cost += norm_of(centers[c], m);
    used[c] = true;
    cost += distance(centers[c], sol, m);
    planted.assignment.push_back(static_cast<int>(c));
    planted.predictions.push_back(centers[c]);
    solutions.push_back(std::move(sol));
  }
  s.meta.planted = std::move(planted);
  s.meta.planted_cost = cost;
  detail::finish(s, features, solutions);
  return s;
}

/// k latent trajectories. Trajectory i starts at (100 i, U[0,50) ...) and,
/// on each of its days after the first, moves exactly `drift` (in the
/// metric) along a random direction. Day t is emitted by trajectory
/// (t-1) mod k with per-coordinate noise of total size at most `noise`.
inline Scenario gen_drifting_trajectories(std::uint64_t seed, int k, double drift, double noise, std::size_t T,
                                          std::size_t dim, Metric m = {}) {
  detail::require_shape(T, dim);
  require(k >= 1, "drifting trajectories: k must be at least 1");
  require(drift >= 0.0 && noise >= 0.0, "drifting trajectories: drift and noise must be nonnegative");
  CounterRng root(seed);
  CounterRng layout = root.split(1), walk = root.split(2), jitter = root.split(3);

  std::vector<Point> pos;
  for (int i = 0; i < k; ++i) {
    std::vector<double> x(dim, 0.0);
    x[0] = 100.0 * static_cast<double>(i);
    for (std::size_t j = 1; j < dim; ++j) x[j] = layout.uniform(0.0, 50.0);
    pos.emplace_back(std::move(x));
  }

  Scenario s;
  s.name = "drifting_trajectories";
  s.seed = seed;
  s.metric = m;
  s.meta.params = {{"k", static_cast<double>(k)}, {"drift", drift}, {"noise", noise}, {"T", static_cast<double>(T)},
                   {"dim", static_cast<double>(dim)}};
  TrajectorySet planted;
  planted.k = k;
  std::vector<Point> features, solutions;
  std::vector<bool> started(static_cast<std::size_t>(k), false);
  double cost = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const auto i = t % static_cast<std::size_t>(k);
    if (!started[i]) {
      cost += norm_of(pos[i], m);
      started[i] = true;
    } else if (drift > 0.0) {
      std::vector<double> dir(dim);
      double len = 0.0;
      while (len == 0.0) {
        for (auto& x : dir) x = walk.uniform(-1.0, 1.0);
        len = norm_of(Point(dir), m);
      }
      for (auto& x : dir) x *= drift / len;
      Point next = detail::add(pos[i], dir);
      cost += distance(pos[i], next, m);
      pos[i] = std::move(next);
    }
    Point sol = detail::add(pos[i], detail::box_noise(jitter, dim, noise));
    cost += distance(pos[i], sol, m);
    features.push_back(sol);
    planted.assignment.push_back(static_cast<int>(i));
    planted.predictions.push_back(pos[i]);
    solutions.push_back(std::move(sol));
  }
  s.meta.planted = std::move(planted);
  s.meta.planted_cost = cost;
  detail::finish(s, features, solutions);
  return s;
}

/// k fixed solutions c * sep * e1; each day draws one uniformly. Features
/// are a constant zero, so nothing can be learned from them.
inline Scenario gen_planted_lower_bound(std::uint64_t seed, int k, double sep, std::size_t T, std::size_t dim,
                                        Metric m = {}) {
  detail::require_shape(T, dim);
  require(k >= 1, "planted lower bound: k must be at least 1");
  require(sep > 0.0, "planted lower bound: sep must be positive");
  CounterRng pick = CounterRng(seed).split(2);
  std::vector<Point> points;
  for (int c = 0; c < k; ++c) {
    std::vector<double> x(dim, 0.0);
    x[0] = static_cast<double>(c) * sep;
    points.emplace_back(std::move(x));
  }
  Scenario s;
  s.name = "planted_lower_bound";
  s.seed = seed;
  s.metric = m;
  s.meta.params = {{"k", static_cast<double>(k)}, {"sep", sep}, {"T", static_cast<double>(T)}, {"dim", static_cast<double>(dim)}};
  TrajectorySet planted;
  planted.k = k;
  std::vector<Point> features, solutions;
  std::vector<bool> used(static_cast<std::size_t>(k), false);
  double cost = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const auto c = static_cast<std::size_t>(pick.below(static_cast<std::uint64_t>(k)));
    if (!used[c]) cost += norm_of(points[c], m);
    used[c] = true;
    features.push_back(Point::zeros(1));
    planted.assignment.push_back(static_cast<int>(c));
    planted.predictions.push_back(points[c]);
    solutions.push_back(points[c]);
  }
  s.meta.planted = std::move(planted);
  s.meta.planted_cost = cost;
  detail::finish(s, features, solutions);
  return s;
}

/// Solutions dwell near one of two anchors (origin, jump * e1) for a phase,
/// then switch. Phase of 0-based day t is floor(t * phases / T); anchors
/// alternate by phase parity. Jitter is U[0, 1/dim) per coordinate.
inline Scenario gen_adversarial_switch(std::uint64_t seed, std::size_t phases, std::size_t T, std::size_t dim,
                                       double jump = 1e3, Metric m = {}) {
  detail::require_shape(T, dim);
  require(phases >= 1 && phases <= T, "adversarial switch: need 1 <= phases <= T");
  require(jump > 0.0, "adversarial switch: jump must be positive");
  CounterRng jitter = CounterRng(seed).split(3);
  std::vector<Point> anchors{Point::zeros(dim), Point::zeros(dim)};
  {
    std::vector<double> x(dim, 0.0);
    x[0] = jump;
    anchors[1] = Point(std::move(x));
  }
  Scenario s;
  s.name = "adversarial_switch";
  s.seed = seed;
  s.metric = m;
  s.meta.params = {{"phases", static_cast<double>(phases)}, {"T", static_cast<double>(T)},
                   {"dim", static_cast<double>(dim)}, {"jump", jump}};
  TrajectorySet planted;
  planted.k = 2;
  std::vector<Point> features, solutions;
  bool used_far = false;
  double cost = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t region = (t * phases / T) % 2;
    std::vector<double> off(dim);
    for (auto& x : off) x = jitter.uniform(0.0, 1.0 / static_cast<double>(dim));
    Point sol = detail::add(anchors[region], off);
    if (region == 1 && !used_far) {
      cost += norm_of(anchors[1], m);
      used_far = true;
    }
    cost += distance(anchors[region], sol, m);
    features.push_back(sol);
    planted.assignment.push_back(static_cast<int>(region));
    planted.predictions.push_back(anchors[region]);
    solutions.push_back(std::move(sol));
  }
  s.meta.planted = std::move(planted);
  s.meta.planted_cost = cost;
  detail::finish(s, features, solutions);
  return s;
}

// ---------------------------------------------------------------------------
// Generator dispatch by name

namespace detail {

inline double param(const std::map<std::string, double>& p, const std::string& key, std::optional<double> fallback) {
  auto it = p.find(key);
  if (it != p.end()) return it->second;
  if (fallback) return *fallback;
  throw UsageError("generator parameter '" + key + "' is required");
}

inline std::size_t count_param(const std::map<std::string, double>& p, const std::string& key,
                               std::optional<double> fallback) {
  const double v = param(p, key, fallback);
  require(v >= 1.0 && v == static_cast<double>(static_cast<long long>(v)) && v <= 1e7,
          "generator parameter '" + key + "' must be a positive integer");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

inline const std::vector<std::string>& generator_names() {
  static const std::vector<std::string> names{"static_clusters", "drifting_trajectories", "planted_lower_bound",
                                              "adversarial_switch"};
  return names;
}

/// Builds a scenario from a generator name and a parameter map. Unknown
/// parameters are rejected so typos do not silently fall back to defaults.
inline Scenario generate(const std::string& generator, std::uint64_t seed, const std::map<std::string, double>& p,
                         Metric m) {
  using detail::count_param;
  using detail::param;
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, _] : p) {
      bool ok = false;
      for (const char* a : keys) ok = ok || key == a;
      require(ok, "generator '" + generator + "' has no parameter '" + key + "'");
    }
  };
  if (generator == "static_clusters") {
    allow({"k", "sep", "spread", "T", "dim"});
    return gen_static_clusters(seed, static_cast<int>(count_param(p, "k", 3)), param(p, "sep", 100.0),
                               param(p, "spread", 1.0), count_param(p, "T", 30), count_param(p, "dim", 2), m);
  }
  if (generator == "drifting_trajectories") {
    allow({"k", "drift", "noise", "T", "dim"});
    return gen_drifting_trajectories(seed, static_cast<int>(count_param(p, "k", 2)), param(p, "drift", 1.0),
                                     param(p, "noise", 0.5), count_param(p, "T", 40), count_param(p, "dim", 2), m);
  }
  if (generator == "planted_lower_bound") {
    allow({"k", "sep", "T", "dim"});
    return gen_planted_lower_bound(seed, static_cast<int>(count_param(p, "k", 4)), param(p, "sep", 1e6),
                                   count_param(p, "T", 1000), count_param(p, "dim", 1), m);
  }
  if (generator == "adversarial_switch") {
    allow({"phases", "T", "dim", "jump"});
    return gen_adversarial_switch(seed, count_param(p, "phases", 4), count_param(p, "T", 20),
                                  count_param(p, "dim", 2), param(p, "jump", 1e3), m);
  }
  throw UsageError("unknown generator '" + generator + "'");
}

// ---------------------------------------------------------------------------
// Serialization

inline constexpr const char* kScenarioFormat = "warmstart.scenario";
inline constexpr int kScenarioVersion = 1;

inline nlohmann::ordered_json point_json(const Point& p) {
  return nlohmann::ordered_json(std::vector<double>(p.coords().begin(), p.coords().end()));
}

inline nlohmann::ordered_json to_json(const Scenario& s) {
  nlohmann::ordered_json j;
  j["format"] = kScenarioFormat;
  j["version"] = kScenarioVersion;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["dim"] = s.dim;
  j["feature_dim"] = s.feature_dim;
  j["metric"] = std::string(to_string(s.metric.norm));
  j["d_max"] = s.d_max;
  auto& meta = j["meta"];
  meta["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : s.meta.params) meta["params"][k] = v;
  if (s.meta.planted) {
    meta["planted"]["k"] = s.meta.planted->k;
    meta["planted"]["assignment"] = s.meta.planted->assignment;
    meta["planted"]["predictions"] = nlohmann::ordered_json::array();
    for (const auto& p : s.meta.planted->predictions) meta["planted"]["predictions"].push_back(point_json(p));
  } else {
    meta["planted"] = nullptr;
  }
  meta["planted_cost"] = s.meta.planted_cost;
  j["days"] = nlohmann::ordered_json::array();
  for (const auto& d : s.days) {
    nlohmann::ordered_json dj;
    dj["day"] = d.day();
    dj["features"] = point_json(d.features());
    dj["solution"] = point_json(Hindsight::solution(d));
    j["days"].push_back(std::move(dj));
  }
  return j;
}

inline std::string serialize_scenario(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

/// Parses and validates a scenario file. d_max is checked against the
/// solutions, so a hand-edited file cannot understate the diameter.
inline Scenario parse_scenario(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("scenario is not valid JSON: ") + e.what());
  }
  auto point = [](const nlohmann::json& a) {
    try {
      return Point(a.get<std::vector<double>>());
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("scenario point: ") + e.what());
    }
  };
  try {
    require(j.at("format").get<std::string>() == kScenarioFormat, "not a scenario file");
    require(j.at("version").get<int>() == kScenarioVersion, "unsupported scenario version");
    Scenario s;
    s.name = j.at("name").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.metric.norm = norm_from_string(j.at("metric").get<std::string>());
    const auto& meta = j.at("meta");
    s.meta.params = meta.at("params").get<std::map<std::string, double>>();
    if (!meta.at("planted").is_null()) {
      TrajectorySet ts;
      ts.k = meta.at("planted").at("k").get<int>();
      ts.assignment = meta.at("planted").at("assignment").get<std::vector<int>>();
      for (const auto& p : meta.at("planted").at("predictions")) ts.predictions.push_back(point(p));
      ts.validate();
      s.meta.planted = std::move(ts);
    }
    s.meta.planted_cost = meta.at("planted_cost").get<double>();
    std::vector<Point> features, solutions;
    std::size_t expect = 1;
    for (const auto& dj : j.at("days")) {
      require(dj.at("day").get<std::size_t>() == expect++, "scenario days must be numbered 1..T in order");
      features.push_back(point(dj.at("features")));
      solutions.push_back(point(dj.at("solution")));
      require_same_dim(features.back(), features.front());
      require_same_dim(solutions.back(), solutions.front());
    }
    require(!solutions.empty(), "scenario has no days");
    if (s.meta.planted) {
      require(s.meta.planted->days() == solutions.size(), "planted trajectory set and days differ in length");
      for (const auto& p : s.meta.planted->predictions) require_same_dim(p, solutions.front());
    }
    detail::finish(s, features, solutions);
    require(j.at("dim").get<std::size_t>() == s.dim, "scenario dim does not match its solutions");
    require(j.at("feature_dim").get<std::size_t>() == s.feature_dim, "scenario feature_dim does not match");
    const double stored = j.at("d_max").get<double>();
    require(stored >= s.d_max, "scenario d_max is below the maximum pairwise solution distance");
    s.d_max = stored;
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed scenario: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Corpus

/// Fixed set of small scenarios covering every generator and norm. Used by
/// the invariant suites; T stays at most 60.
inline std::vector<Scenario> corpus() {
  std::vector<Scenario> out;
  const Norm norms[] = {Norm::L1, Norm::L2, Norm::Linf};
  std::uint64_t seed = 1;
  for (Norm n : norms) {
    const Metric m{n};
    out.push_back(gen_static_clusters(seed++, 3, 100.0, 1.0, 30, 2, m));
    out.push_back(gen_static_clusters(seed++, 1, 10.0, 3.0, 20, 3, m));
    out.push_back(gen_drifting_trajectories(seed++, 1, 1.0, 0.5, 40, 2, m));
    out.push_back(gen_drifting_trajectories(seed++, 2, 2.0, 1.0, 40, 2, m));
    out.push_back(gen_drifting_trajectories(seed++, 3, 0.5, 0.0, 60, 4, m));
    out.push_back(gen_planted_lower_bound(seed++, 4, 50.0, 40, 2, m));
    out.push_back(gen_adversarial_switch(seed++, 4, 20, 2, 1e3, m));
    out.push_back(gen_adversarial_switch(seed++, 20, 20, 1, 100.0, m));
    out.push_back(gen_static_clusters(seed++, 2, 30.0, 0.0, 25, 1, m));
  }
  return out;
}

}  // namespace warmstart
