#include <gtest/gtest.h>

#include <cmath>

#include "polarsolve/oracle.hpp"
#include "polarsolve/oracle_check.hpp"

using namespace polarsolve;

namespace {
const ModelParams kBase{0.5, 0.9, 1.0};
const CostSpec kTen = CostSpec::quadratic(10);
}  // namespace

TEST(BruteForceOneStep, Examples) {
  OracleResult r = brute_force_one_step([](double x) { return -(x - 0.3) * (x - 0.3); }, Grid(10001));
  EXPECT_NEAR(r.argmax, 0.3, 1e-15);
  EXPECT_NEAR(r.value, 0.0, 1e-30);
  EXPECT_EQ(r.evaluations, 10001u);
  r = brute_force_one_step([](double x) { return stage_payoff(1, x, 1.0) - 10 * (x - 0.4) * (x - 0.4); }, Grid(10001));
  EXPECT_EQ(r.argmax, 0.5);
  EXPECT_NEAR(r.value, 0.9, 1e-12);
  r = brute_force_one_step([](double) { return 1.0; }, Grid(101));
  EXPECT_EQ(r.argmax, 0.0);
}

TEST(TwoPeriodOracle, Examples) {
  const Grid g(2001);
  OracleResult r = brute_force_two_period_single(kBase, kTen, 0.3, 0, g);
  EXPECT_NEAR(r.value, 1.775862, 2e-4);
  EXPECT_NEAR(r.argmax, 0.362069, 1e-3);
  r = brute_force_two_period_single(kBase, kTen, 0.5, 1, g);
  EXPECT_NEAR(r.value, 1.9, 1e-12);
  r = brute_force_two_period_single(kBase, CostSpec::quadratic(1e7), 0.3, 0, g);
  EXPECT_EQ(r.argmax, g[g.nearest_index(0.3)]);
  EXPECT_NEAR(r.value, 1.0 + 0.9 * 0.5, 1e-12);
}

TEST(StackelbergOracle, Examples) {
  const Grid g(2001);
  OracleResult r = brute_force_stackelberg(kBase, kTen, 0.35, 0, g);
  EXPECT_NEAR(r.value, 1.173683, 2e-3);
  EXPECT_NEAR(r.argmax, 0.183772, 1e-3);
  r = brute_force_stackelberg(kBase, kTen, 0.9, 1, g);
  EXPECT_NEAR(r.value, 1.45, 1e-12);
  const double p0 = g[g.nearest_index(0.37)];
  r = brute_force_stackelberg(kBase, CostSpec::quadratic(1e6), p0, 1, g);
  EXPECT_EQ(r.argmax, p0);
}

TEST(OracleCheck, Period2IsExact) {
  const Grid scan(201), og(2001);
  for (double k : {0.5, 10.0, 200.0}) {
    for (double H : {0.5, 1.0, 2.0}) {
      const auto rows = check_period2({0.5, 0.9, H}, CostSpec::quadratic(k), scan, og);
      const OracleSummary s = summarize(OracleCheck::Period2, rows);
      EXPECT_EQ(s.failures, 0u) << "k=" << k << " H=" << H;
      EXPECT_LE(s.max_value_diff, 1e-12);
    }
  }
}

TEST(OracleCheck, Period1AndStackelbergWithinResolution) {
  const Grid scan(201), og(2001);
  for (double pi : {0.3, 0.5, 0.7}) {
    const ModelParams mp{pi, 0.9, 1.0};
    const auto p1 = check_period1(mp, kTen, scan, og);
    const auto st = check_stackelberg(mp, kTen, scan, og);
    EXPECT_EQ(summarize(OracleCheck::Period1, p1).failures, 0u);
    EXPECT_EQ(summarize(OracleCheck::Stackelberg, st).failures, 0u);
    // The oracle searches a subset of the closed form's choice set.
    for (const auto& r : p1) EXPECT_LE(r.oracle_value, r.closed_value + 1e-12);
    for (const auto& r : st) EXPECT_LE(r.oracle_value, r.closed_value + 1e-12);
  }
}

TEST(OracleCheck, ArgmaxDiscrepancyShrinksWithResolution) {
  const Grid scan(201);
  const auto coarse = check_period1(kBase, kTen, scan, Grid(1001));
  const auto fine = check_period1(kBase, kTen, scan, Grid(4001));
  const double dc = summarize(OracleCheck::Period1, coarse).max_argmax_diff;
  const double df = summarize(OracleCheck::Period1, fine).max_argmax_diff;
  EXPECT_GT(dc, 0.0);
  EXPECT_LE(df, 0.5 * dc);
  const auto sc = check_stackelberg(kBase, kTen, scan, Grid(1001));
  const auto sf = check_stackelberg(kBase, kTen, scan, Grid(4001));
  EXPECT_LE(summarize(OracleCheck::Stackelberg, sf).max_argmax_diff,
            0.5 * summarize(OracleCheck::Stackelberg, sc).max_argmax_diff);
}

TEST(OracleCheck, RequiresNestedGrids) {
  EXPECT_THROW(check_period2(kBase, kTen, Grid(201), Grid(301)), std::invalid_argument);
}
