#include <gtest/gtest.h>

#include <filesystem>

#include <warmstart/harness.hpp>

using namespace warmstart;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("warmstart_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string line_scenario(std::initializer_list<double> xs) {
  Scenario s;
  s.name = "line";
  s.seed = 0;
  s.metric = Metric{Norm::L1};
  std::vector<Point> f, sol;
  for (double x : xs) {
    f.push_back(Point{x});
    sol.push_back(Point{x});
  }
  detail::finish(s, f, sol);
  return serialize_scenario(s);
}

RunConfig file_config(const std::string& path, const std::string& strategy) {
  RunConfig c;
  c.scenario.file = path;
  c.strategy = strategy;
  return c;
}

}  // namespace

TEST(Ledger, RoundTrip) {
  RunConfig c;
  c.strategy = "kserver-greedy";
  const auto out = cmd_simulate(c);
  const auto back = parse_ledger(out.text);
  EXPECT_EQ(back, out.ledger);
  EXPECT_EQ(serialize_ledger(back), out.text);
}

TEST(Ledger, ParseErrors) {
  RunConfig c;
  c.strategy = "predict-yesterday";
  auto j = nlohmann::json::parse(cmd_simulate(c).text);
  EXPECT_THROW(parse_ledger("not json"), UsageError);
  auto bad = j;
  bad["schema"] = "x";
  EXPECT_THROW(parse_ledger(bad.dump()), UsageError);
  bad = j;
  bad["totals"]["radius"] = 1;
  EXPECT_THROW(parse_ledger(bad.dump()), UsageError);
  bad = j;
  bad.erase("days");
  EXPECT_THROW(parse_ledger(bad.dump()), UsageError);
}

TEST(Simulate, PredictYesterdayOnAFile) {
  TempDir dir;
  const auto path = dir.file("s.json");
  write_text_file(path, line_scenario({0, 3, 5}));
  const auto r = cmd_simulate(file_config(path, "predict-yesterday"));
  EXPECT_EQ(r.ledger.totals.radius, 6);
  EXPECT_EQ(r.ledger.scenario, "line@0");
  EXPECT_EQ(r.ledger.params.at("generator"), "file");
  // opt over one trajectory: 0 -> 3 -> 5 from the origin
  EXPECT_EQ(*r.ledger.baselines.at("opt_1_traj"), 5.0);
  EXPECT_EQ(*r.ledger.ratios().at("opt_1_traj"), 6.0 / 5.0);
}

TEST(Simulate, KServerOneMatchesPredictYesterday) {
  RunConfig c;
  c.scenario.generator = "static_clusters";
  c.strategy = "predict-yesterday";
  const auto py = cmd_simulate(c).ledger;
  c.strategy = "kserver-greedy";
  c.k = 1;
  const auto ks = cmd_simulate(c).ledger;
  EXPECT_EQ(ks.totals.radius, py.totals.radius);
  EXPECT_NEAR(ks.measured.at("alpha"), 1.0, 1e-9);
}

TEST(Simulate, EveryStrategyRunsAndWritesItsOutput) {
  TempDir dir;
  for (const auto& st : strategy_names()) {
    RunConfig c;
    c.strategy = st;
    c.out = dir.file(st + ".json");
    const auto r = cmd_simulate(c);
    EXPECT_EQ(read_text_file(*c.out), r.text);
    EXPECT_EQ(r.ledger.strategy.rfind(st.substr(0, 7), 0), 0u) << st;
    EXPECT_GT(r.ledger.totals.radius, 0);
  }
}

TEST(Simulate, HoldoutStrategiesEvaluateTheSuffix) {
  RunConfig c;
  c.strategy = "parallel-k";
  c.train_fraction = 0.25;
  const auto l = cmd_simulate(c).ledger;
  EXPECT_EQ(l.days.size(), 30u);
  EXPECT_EQ(l.days.front().day, 11u);
  EXPECT_EQ(l.params.at("eval_from_day"), "11");
  EXPECT_TRUE(l.baselines.count("planted"));
}

TEST(Simulate, LargeScenariosSkipCappedBaselines) {
  RunConfig c;
  c.scenario.generator = "planted_lower_bound";
  c.strategy = "predict-yesterday";
  c.scenario.params = {{"T", 600.0}};
  const auto l = cmd_simulate(c).ledger;
  EXPECT_FALSE(l.baselines.at("opt_kserver/k=1").has_value());
  EXPECT_FALSE(l.baselines.at("opt_1_traj").has_value());
  EXPECT_TRUE(l.baselines.at("planted").has_value());
  EXPECT_FALSE(l.ratios().at("opt_kserver/k=2").has_value());
}

TEST(Learn, ProducesAHoldoutEvaluation) {
  RunConfig c;
  c.scenario.generator = "static_clusters";
  c.k = 3;
  auto j = nlohmann::json::parse(cmd_learn(c));
  EXPECT_EQ(j.at("schema"), "warmstart.learned");
  EXPECT_EQ(j.at("centers").size(), 3u);
  EXPECT_EQ(j.at("train_days"), 15);
  EXPECT_LT(j.at("holdout_cost").get<double>(), 5.0);
  c.learner = "partition";
  c.k = 2;
  j = nlohmann::json::parse(cmd_learn(c));
  EXPECT_EQ(j.at("rotation").size(), 2u);
  EXPECT_GT(j.at("holdout_total_radius").get<long long>(), 0);
}

TEST(Report, SingleLedger) {
  TempDir dir;
  const auto path = dir.file("s.json");
  write_text_file(path, line_scenario({0, 3, 5}));
  RunConfig c = file_config(path, "predict-yesterday");
  c.baseline_ks = {1};
  const auto r = cmd_report({cmd_simulate(c).ledger});
  EXPECT_EQ(r.csv,
            "scenario,strategy,k,days,total_radius,total_overhead,wall_estimate,"
            "baseline:opt_1_traj,ratio:opt_1_traj,"
            "baseline:opt_k_traj_restricted/k=1,ratio:opt_k_traj_restricted/k=1,"
            "baseline:opt_kserver/k=1,ratio:opt_kserver/k=1\n"
            "line@0,predict-yesterday,NA,3,6,0,6,5,1.2,5,1.2,5,1.2\n");
}

TEST(Report, RowsShareColumnsAndMissingCellsAreNA) {
  CostLedger a, b;
  a.scenario = "z@1";
  a.strategy = "s1";
  a.baselines["x"] = 4.0;
  a.days.push_back(DayLedger{1, 8, 1, 8, 0, std::nullopt, 0.0});
  a.recompute_totals();
  b.scenario = "a@1";
  b.strategy = "s2";
  b.baselines["y"] = std::nullopt;
  b.params["k"] = "2";
  const auto r = cmd_report({a, b});
  EXPECT_EQ(r.csv,
            "scenario,strategy,k,days,total_radius,total_overhead,wall_estimate,baseline:x,ratio:x,baseline:y,ratio:y\n"
            "a@1,s2,2,0,0,0,0,NA,NA,NA,NA\n"
            "z@1,s1,NA,1,8,1,9,4,2,NA,NA\n");
  const auto j = nlohmann::json::parse(r.json);
  EXPECT_EQ(j.at("rows").size(), 2u);
  EXPECT_EQ(j.at("rows")[1].at("ratios").at("x"), 2.0);
  EXPECT_THROW(cmd_report({}), UsageError);
}

TEST(Config, ParsesAndRejects) {
  const auto c = parse_run_config(
      R"({"scenario": {"generator": "adversarial_switch", "seed": 9, "metric": "Linf", "params": {"phases": 2}},
          "strategy": "kserver-wfa", "k": 3, "baseline_ks": [2]})");
  EXPECT_EQ(c.scenario.generator, "adversarial_switch");
  EXPECT_EQ(c.scenario.seed, 9u);
  EXPECT_EQ(c.scenario.metric.norm, Norm::Linf);
  EXPECT_EQ(c.k, 3);
  EXPECT_NO_THROW(c.validate());
  EXPECT_THROW(parse_run_config("{"), UsageError);
  EXPECT_THROW(parse_run_config(R"({"strategi": "x"})"), UsageError);
  EXPECT_THROW(parse_run_config(R"({"k": "two"})"), UsageError);
  EXPECT_THROW(parse_run_config(R"({"scenario": {"gen": "x"}})"), UsageError);

  RunConfig bad;
  bad.strategy = "oracle";
  EXPECT_THROW(bad.validate(), UsageError);
  bad = RunConfig{};
  bad.strategy = "kserver-wfa";
  bad.k = 4;
  EXPECT_THROW(bad.validate(), UsageError);
  bad = RunConfig{};
  bad.train_fraction = 1.0;
  EXPECT_THROW(bad.validate(), UsageError);
  bad = RunConfig{};
  bad.scenario.file = "/nonexistent/scenario.json";
  EXPECT_THROW(cmd_simulate(bad), UsageError);
}

TEST(Config, ScenarioFlag) {
  RunConfig c;
  apply_scenario_flag(c, "planted_lower_bound");
  EXPECT_FALSE(c.scenario.file);
  EXPECT_EQ(c.scenario.generator, "planted_lower_bound");
  apply_scenario_flag(c, "mine.json");
  EXPECT_EQ(c.scenario.file, std::optional<std::string>("mine.json"));
}

TEST(FormatReal, ShortestRoundTrip) {
  EXPECT_EQ(format_real(1.2), "1.2");
  EXPECT_EQ(format_real(5.0), "5");
  EXPECT_EQ(format_real(0.1 + 0.2), "0.30000000000000004");
  EXPECT_EQ(format_real(1e6), "1000000");
}

TEST(TrainSplit, Bounds) {
  EXPECT_EQ(train_split(40, 0.5), 20u);
  EXPECT_EQ(train_split(10, 0.25), 2u);
  EXPECT_THROW(train_split(1, 0.5), UsageError);
  EXPECT_THROW(train_split(10, 0.01), UsageError);
}
