#include <gtest/gtest.h>

#include <fstream>
#include <iostream>

#include <json.hpp>

#include <warmstart/acceptance.hpp>

using namespace warmstart;

namespace {

std::map<std::string, double> theorem_goldens() {
  std::ifstream in(std::string(WARMSTART_GOLDEN_DIR) + "/theorem_ratios.json");
  if (!in) return {};
  return nlohmann::json::parse(in).get<std::map<std::string, double>>();
}

}  // namespace

TEST(Acceptance, EveryCriterionPasses) {
  const auto goldens = theorem_goldens();
  ASSERT_FALSE(goldens.empty()) << "missing tests/golden/theorem_ratios.json";
  const auto list = acceptance::criteria(&goldens);
  ASSERT_EQ(list.size(), 13u);
  for (const auto& c : list) {
    const auto r = acceptance::run_criterion(c);
    std::cout << acceptance::format_line(r) << "\n";
    EXPECT_TRUE(r.pass) << acceptance::format_line(r);
  }
}

TEST(Acceptance, GoldenKeysMatchTheMeasuredSet) {
  const auto goldens = theorem_goldens();
  const auto measured = acceptance::drifting_ratios();
  ASSERT_EQ(goldens.size(), measured.size());
  for (const auto& [k, v] : measured) EXPECT_TRUE(goldens.count(k)) << k;
}

TEST(Acceptance, TheoremBound) {
  EXPECT_NEAR(acceptance::theorem_bound(1), 1000.0 * std::log(2.0) * std::log(2.0), 1e-9);
  EXPECT_NEAR(acceptance::theorem_bound(2), 16000.0 * std::log(3.0) * std::log(3.0), 1e-9);
}

TEST(Acceptance, FailuresAreReported) {
  acceptance::Criterion boom{99, "throws", 1.0, [](acceptance::detail::Outcome&) { throw InvariantViolation("x"); }};
  const auto r = acceptance::run_criterion(boom);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(acceptance::format_line(r).rfind("FAIL", 0), 0u);
}
