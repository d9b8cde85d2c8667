#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "warmstart/errors.hpp"

namespace warmstart {

/// One day of a strategy run.
///
/// `solver` identifies the winning search: the 1-based source day of the
/// completing thread (0 = origin) for single-thread and decay strategies,
/// the 0-based server or center index for parallel strategies.
/// `nearest_distance` is the distance from the closest prediction the
/// strategy started from to the day's solution, when that is defined.
struct DayLedger {
  std::size_t day = 0;
  long long radius_searched = 0;
  long long overhead_work = 0;
  long long virtual_radius = 0;
  long long solver = 0;
  std::optional<double> nearest_distance;
  double movement = 0.0;  // k-server movement after the reveal, if any

  bool operator==(const DayLedger&) const = default;
};

struct LedgerTotals {
  long long radius = 0;
  long long overhead = 0;
  long long wall_estimate = 0;  // radius + overhead

  bool operator==(const LedgerTotals&) const = default;
};

inline constexpr const char* kLedgerSchema = "warmstart.ledger";
inline constexpr int kLedgerVersion = 1;

/// Output contract of a simulation run. Baselines map a name to a value or
/// to nullopt when the baseline was skipped (size cap); ratios are
/// totals.radius / baseline and are always recomputed, never stored alone.
struct CostLedger {
  std::string scenario;
  std::string strategy;
  std::map<std::string, std::string> params;
  std::vector<DayLedger> days;
  LedgerTotals totals;
  std::map<std::string, std::optional<double>> baselines;
  std::map<std::string, double> measured;  // e.g. k-server movement and its ratio (alpha)

  void recompute_totals() {
    totals = LedgerTotals{};
    for (const auto& d : days) {
      totals.radius += d.radius_searched;
      totals.overhead += d.overhead_work;
    }
    totals.wall_estimate = totals.radius + totals.overhead;
  }

  std::map<std::string, std::optional<double>> ratios() const {
    std::map<std::string, std::optional<double>> out;
    for (const auto& [name, v] : baselines) {
      if (v && *v > 0.0)
        out[name] = static_cast<double>(totals.radius) / *v;
      else
        out[name] = std::nullopt;
    }
    return out;
  }

  bool operator==(const CostLedger&) const = default;
};

inline nlohmann::ordered_json to_json(const DayLedger& d) {
  nlohmann::ordered_json j;
  j["day"] = d.day;
  j["radius_searched"] = d.radius_searched;
  j["overhead_work"] = d.overhead_work;
  j["virtual_radius"] = d.virtual_radius;
  j["solver"] = d.solver;
  j["nearest_distance"] = d.nearest_distance ? nlohmann::ordered_json(*d.nearest_distance) : nlohmann::ordered_json();
  j["movement"] = d.movement;
  return j;
}

inline nlohmann::ordered_json to_json(const CostLedger& l) {
  nlohmann::ordered_json j;
  j["schema"] = kLedgerSchema;
  j["version"] = kLedgerVersion;
  j["scenario"] = l.scenario;
  j["strategy"] = l.strategy;
  j["params"] = l.params;
  j["totals"] = {{"radius", l.totals.radius},
                 {"overhead", l.totals.overhead},
                 {"wall_estimate", l.totals.wall_estimate}};
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json("unavailable");
  };
  j["baselines"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : l.baselines) j["baselines"][k] = opt(v);
  j["ratios"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : l.ratios()) j["ratios"][k] = opt(v);
  j["measured"] = l.measured;
  j["days"] = nlohmann::ordered_json::array();
  for (const auto& d : l.days) j["days"].push_back(to_json(d));
  return j;
}

inline std::string serialize_ledger(const CostLedger& l) { return to_json(l).dump(2) + "\n"; }

inline CostLedger parse_ledger(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("ledger is not valid JSON: ") + e.what());
  }
  try {
    require(j.at("schema").get<std::string>() == kLedgerSchema, "not a ledger file");
    require(j.at("version").get<int>() == kLedgerVersion, "unsupported ledger version");
    CostLedger l;
    l.scenario = j.at("scenario").get<std::string>();
    l.strategy = j.at("strategy").get<std::string>();
    l.params = j.at("params").get<std::map<std::string, std::string>>();
    for (const auto& [k, v] : j.at("baselines").items())
      l.baselines[k] = v.is_number() ? std::optional<double>(v.get<double>()) : std::nullopt;
    l.measured = j.at("measured").get<std::map<std::string, double>>();
    for (const auto& dj : j.at("days")) {
      DayLedger d;
      d.day = dj.at("day").get<std::size_t>();
      d.radius_searched = dj.at("radius_searched").get<long long>();
      d.overhead_work = dj.at("overhead_work").get<long long>();
      d.virtual_radius = dj.at("virtual_radius").get<long long>();
      d.solver = dj.at("solver").get<long long>();
      if (!dj.at("nearest_distance").is_null()) d.nearest_distance = dj.at("nearest_distance").get<double>();
      d.movement = dj.at("movement").get<double>();
      l.days.push_back(d);
    }
    l.totals.radius = j.at("totals").at("radius").get<long long>();
    l.totals.overhead = j.at("totals").at("overhead").get<long long>();
    l.totals.wall_estimate = j.at("totals").at("wall_estimate").get<long long>();
    LedgerTotals stored = l.totals;
    l.recompute_totals();
    require(stored == l.totals, "ledger totals do not match the per-day entries");
    return l;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed ledger: ") + e.what());
  }
}

}  // namespace warmstart
