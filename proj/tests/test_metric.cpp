#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include <warmstart/metric.hpp>
#include <warmstart/rng.hpp>

using namespace warmstart;

TEST(Point, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(Point(std::vector<double>{}), UsageError);
  EXPECT_THROW((Point{1.0, std::numeric_limits<double>::quiet_NaN()}), UsageError);
  EXPECT_THROW((Point{std::numeric_limits<double>::infinity()}), UsageError);
  EXPECT_EQ(Point::zeros(3).dim(), 3u);
}

TEST(Distance, Examples) {
  const Point u{1.5, -2.0};
  for (Norm n : {Norm::L1, Norm::L2, Norm::Linf}) EXPECT_EQ(distance(u, u, Metric{n}), 0.0);
  EXPECT_EQ(distance(Point{0.0}, Point{3.0}, Metric{Norm::L1}), 3.0);
  EXPECT_EQ(distance(Point{3.0, 4.0}, Point{0.0, 0.0}, Metric{Norm::L2}), 5.0);
  EXPECT_EQ(distance(Point{3.0, 4.0}, Point{0.0, 0.0}, Metric{Norm::L1}), 7.0);
  EXPECT_EQ(distance(Point{3.0, -4.0}, Point{0.0, 0.0}, Metric{Norm::Linf}), 4.0);
}

TEST(Distance, DimensionMismatchIsRejected) {
  EXPECT_THROW(distance(Point{1.0}, Point{1.0, 2.0}, Metric{}), UsageError);
  EXPECT_THROW(search_steps(Point{1.0}, Point{1.0, 2.0}, Metric{}), UsageError);
}

TEST(Distance, NormNamesRoundTrip) {
  for (Norm n : {Norm::L1, Norm::L2, Norm::Linf}) EXPECT_EQ(norm_from_string(to_string(n)), n);
  EXPECT_THROW(norm_from_string("L3"), UsageError);
}

class MetricProperties : public ::testing::TestWithParam<Norm> {};

TEST_P(MetricProperties, TriangleSymmetryIdentity) {
  const Metric m{GetParam()};
  CounterRng rng(static_cast<std::uint64_t>(GetParam()) + 11);
  auto draw = [&](std::size_t dim) {
    std::vector<double> x(dim);
    for (auto& v : x) v = rng.uniform(-100.0, 100.0);
    return Point(std::move(x));
  };
  for (int i = 0; i < 1000; ++i) {
    const std::size_t dim = 1 + rng.below(8);
    const Point u = draw(dim), v = draw(dim), w = draw(dim);
    EXPECT_LE(distance(u, w, m), distance(u, v, m) + distance(v, w, m) + 1e-9);
    EXPECT_EQ(distance(u, v, m), distance(v, u, m));  // bitwise
    EXPECT_GT(distance(u, v, m), 0.0);
    EXPECT_EQ(distance(u, u, m), 0.0);
  }
}

INSTANTIATE_TEST_SUITE_P(AllNorms, MetricProperties, ::testing::Values(Norm::L1, Norm::L2, Norm::Linf));

TEST(SearchSteps, Examples) {
  const Metric l1{Norm::L1};
  EXPECT_EQ(search_steps(Point{4.0}, Point{4.0}, l1), 1);
  EXPECT_EQ(search_steps(Point{0.0}, Point{2.3}, l1), 3);
  EXPECT_EQ(search_steps(Point{0.0}, Point{0.4}, l1), 1);
  EXPECT_EQ(search_steps(Point{0.0}, Point{7.0}, l1), 7);
}

TEST(SearchSteps, RoundoffDoesNotAddAStep) {
  // 0.1 + 0.2 lands just above 0.3; the sum of three such gaps is 0.9000000000000001-ish
  const Metric l1{Norm::L1};
  EXPECT_EQ(search_steps(Point{0.0, 0.0, 0.0}, Point{0.1 + 0.2, 0.3, 0.4}, l1), 1);
  EXPECT_EQ(search_steps(Point{0.0}, Point{3.0 + 1e-12}, l1), 3);
  EXPECT_EQ(search_steps(Point{0.0}, Point{3.0 + 1e-6}, l1), 4);
}

TEST(SearchSteps, FloorAndCeilingProperty) {
  CounterRng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const Metric m{static_cast<Norm>(rng.below(3))};
    const Point p{rng.uniform(-20, 20), rng.uniform(-20, 20)};
    const Point s{rng.uniform(-20, 20), rng.uniform(-20, 20)};
    const long long k = search_steps(p, s, m);
    const double d = distance(p, s, m);
    EXPECT_GE(k, 1);
    if (d >= 1.0) {
      EXPECT_GE(static_cast<double>(k) - d, -1e-9);
      EXPECT_LE(static_cast<double>(k) - d, 1.0);
    }
  }
}
