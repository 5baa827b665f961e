#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "polarsolve/two_elite.hpp"

using namespace polarsolve;

namespace {

const ModelParams kBase{0.5, 0.9, 1.0};
const CostSpec kTen = CostSpec::quadratic(10);

const CandidateEvaluation& find(const StackelbergSolution& s, Provenance p) {
  for (const auto& c : s.candidates) {
    if (c.provenance == p) return c;
  }
  throw std::logic_error("missing candidate");
}

}  // namespace

TEST(Preferences, OpposedElites) {
  EXPECT_EQ(preferred_policy(Elite::A, 1), 1);
  EXPECT_EQ(preferred_policy(Elite::B, 1), 0);
  EXPECT_EQ(elite_payoff(Elite::B, 0, 1, 2.0), 2.0);
  EXPECT_EQ(elite_payoff(Elite::A, 0, 1, 2.0), 0.0);
}

TEST(EliteBResponse, Examples) {
  EXPECT_EQ(elite_b_response(kBase, kTen, 0.45, 1), 0.45);
  EXPECT_EQ(elite_b_response(kBase, kTen, 0.45, 0), 0.5);
  EXPECT_EQ(elite_b_response(kBase, kTen, 0.10, 0), 0.10);
}

TEST(EliteBResponse, NeverOvershoots) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10000; ++t) {
    const double p = u(rng);
    const double k = 0.5 + 100 * u(rng);
    const double r = elite_b_response(kBase, CostSpec::quadratic(k), p, t % 2);
    EXPECT_TRUE(r == p || r == 0.5);
  }
}

TEST(EliteBResponse, SemiLockDeters) {
  const Grid g(2001);
  const double delta = delta_threshold(kTen, 1.0);
  const double left = g[g.nearest_index(0.5 - delta) - 1];
  const double right = g[g.nearest_index(0.5 + delta) + 1];
  ASSERT_LE(left, 0.5 - delta);
  ASSERT_GE(right, 0.5 + delta);
  for (Binary s = 0; s < 2; ++s) {
    EXPECT_EQ(elite_b_response(kBase, kTen, left, s), left);
    EXPECT_EQ(elite_b_response(kBase, kTen, right, s), right);
  }
  // Exact indifference resolves to staying.
  const CostSpec four = CostSpec::quadratic(4);  // Delta = 1/2
  EXPECT_EQ(elite_b_response(kBase, four, 1.0, 1), 1.0);
}

TEST(PhiContinuation, Examples) {
  EXPECT_NEAR(phi_continuation(kBase, kTen, 0.10), 0.5, 1e-15);
  EXPECT_EQ(phi_continuation(kBase, kTen, 0.35), 0.0);
  EXPECT_NEAR(phi_continuation({0.3, 0.9, 1.0}, kTen, 0.90), 0.3, 1e-15);
}

TEST(StackelbergSolve, WorkedAnchor) {
  const StackelbergSolution s = stackelberg_solve(kBase, kTen, 0.35, 0);
  EXPECT_NEAR(s.chosen, 0.183772, 1e-6);
  EXPECT_NEAR(s.value, 1.173683, 1e-6);
  EXPECT_NEAR(find(s, Provenance::Inaction).objective, 1.0, 1e-12);
  EXPECT_NEAR(find(s, Provenance::Median).objective, 0.775, 1e-12);
  EXPECT_NEAR(find(s, Provenance::SemiLockRight).objective, -1.7237, 1e-4);
  EXPECT_NEAR(find(s, Provenance::SemiLockLeft).objective, 1.17368, 1e-5);
}

TEST(StackelbergSolve, MedianExample) {
  const StackelbergSolution s = stackelberg_solve(kBase, kTen, 0.5, 1);
  EXPECT_EQ(s.chosen, 0.5);
  EXPECT_NEAR(s.value, 1.0, 1e-12);
  // With s1 = 1 the right semi-lock implements A's policy and the left one does not.
  EXPECT_NEAR(find(s, Provenance::SemiLockRight).objective, 1.0 - 1.0 + 0.45, 1e-12);
  EXPECT_NEAR(find(s, Provenance::SemiLockLeft).objective, 0.0 - 1.0 + 0.45, 1e-12);
}

TEST(StackelbergSolve, InactionExample) {
  const StackelbergSolution s = stackelberg_solve(kBase, kTen, 0.10, 0);
  EXPECT_EQ(s.chosen, 0.10);
  EXPECT_NEAR(s.value, 1.45, 1e-12);
  EXPECT_NEAR(find(s, Provenance::SemiLockLeft).objective, 1.3798, 1e-4);
}

TEST(StackelbergSolve, InfeasibleSemiLocksDropped) {
  const StackelbergSolution s = stackelberg_solve(kBase, CostSpec::quadratic(0.5), 0.3, 0);
  EXPECT_FALSE(find(s, Provenance::SemiLockRight).feasible);
  EXPECT_FALSE(find(s, Provenance::SemiLockLeft).feasible);
  EXPECT_TRUE(s.chosen == 0.3 || s.chosen == 0.5);
}

TEST(StackelbergSolve, ChosenIsACandidate) {
  const Grid scan(201);
  for (double pi : {0.3, 0.5, 0.7}) {
    const ModelParams mp{pi, 0.9, 1.0};
    const double d = delta_threshold(kTen, 1.0);
    for (double p : scan.points()) {
      for (Binary s = 0; s < 2; ++s) {
        const StackelbergSolution r = stackelberg_solve(mp, kTen, p, s);
        EXPECT_TRUE(r.chosen == p || r.chosen == 0.5 || r.chosen == 0.5 + d || r.chosen == 0.5 - d);
        double best = -kInfinity;
        for (const auto& c : r.candidates) {
          if (c.feasible) best = std::max(best, c.objective);
        }
        EXPECT_EQ(r.value, best);
      }
    }
  }
}

TEST(MpeSolve, ZeroCostAnchor) {
  const Grid g(101);
  const MpeSolution sol = mpe_solve(kBase, CostSpec::quadratic(0), g);
  EXPECT_EQ(sol.cycle_period, 1u);
  const double v = 1.0 / (1.0 - 0.81);
  for (Elite e : {Elite::A, Elite::B}) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_NEAR(sol.u(e)[i], 0.9 * v, 1e-8);
      for (Binary s = 0; s < 2; ++s) EXPECT_NEAR(sol.v(e)[s][i], v, 1e-8);
    }
  }
  EXPECT_LE(check_no_deviation(kBase, CostSpec::quadratic(0), sol).max_gain, 1e-8);
}

TEST(MpeSolve, ZeroCostClosedFormHasNoDeviation) {
  const Grid g(101);
  const MpeSolution sol = zero_cost_mpe(kBase, g);
  const DeviationReport rep = check_no_deviation(kBase, CostSpec::quadratic(0), sol);
  EXPECT_EQ(rep.max_gain, 0.0);
  EXPECT_LE(rep.waiting_gap, 1e-12);
  EXPECT_LE(rep.value_gap, 1e-12);
}

TEST(MpeSolve, DominantCostFreezesPolicies) {
  const Grid g(501);
  const CostSpec huge = CostSpec::quadratic(1e7);
  ASSERT_GT(huge(g.step()), 1.0 / (1.0 - 0.9));
  const MpeSolution sol = mpe_solve(kBase, huge, g);
  EXPECT_EQ(sol.cycle_period, 1u);
  EXPECT_EQ(absorbing_inaction_points(sol).size(), g.size());
}

TEST(MpeSolve, MirrorIdentitiesExact) {
  const Grid g(101);
  for (double pi : {0.3, 0.5}) {
    const MpeSolution sol = mpe_solve({pi, 0.9, 1.0}, kTen, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::size_t m = g.mirror(i);
      EXPECT_EQ(sol.uB[i], sol.uA[m]);
      for (Binary s = 0; s < 2; ++s) {
        EXPECT_EQ(sol.vB[s][i], sol.vA[s][m]);
        EXPECT_EQ(sol.sigmaB[s][i], g.mirror(sol.sigmaA[s][m]));
      }
    }
  }
}

TEST(MpeSolve, ValuesBoundedAtEveryStep) {
  const Grid g(61);
  MpeOptions opts;
  opts.horizon = 200;
  std::size_t steps = 0;
  bool ok = true;
  opts.on_step = [&](const MpeSolution& s) {
    ++steps;
    for (Elite e : {Elite::A, Elite::B}) {
      for (Binary st = 0; st < 2; ++st) {
        for (double x : s.v(e)[st]) ok &= x >= 0.0 && x <= 10.0 + 1e-12;
      }
      for (double x : s.u(e)) ok &= x >= 0.0 && x <= 10.0 + 1e-12;
    }
  };
  const MpeSolution sol = mpe_solve({0.7, 0.9, 1.0}, CostSpec::quadratic(3), g, opts);
  EXPECT_TRUE(ok);
  EXPECT_EQ(steps, sol.horizon_used);
}

TEST(MpeSolve, StationaryRunHasNoProfitableDeviation) {
  const Grid g(501);
  const ModelParams mp{0.7, 0.9, 1.0};
  const CostSpec c = CostSpec::quadratic(0.5);
  const MpeSolution sol = mpe_solve(mp, c, g);
  ASSERT_EQ(sol.cycle_period, 1u);
  EXPECT_TRUE(sol.converged);
  EXPECT_LE(sol.residual, 1e-9);
  EXPECT_LE(check_no_deviation(mp, c, sol).max_gain, 1e-8);
}

TEST(MpeSolve, CorruptedPolicyShowsDeviationGain) {
  const Grid g(101);
  MpeSolution sol = mpe_solve(kBase, CostSpec::quadratic(0), g);
  sol.sigmaA[0][10] = 90;  // move far past 1/2 at a cost-free but payoff-losing point
  const DeviationReport rep = check_no_deviation(kBase, CostSpec::quadratic(0), sol);
  EXPECT_GT(rep.max_gain, 0.0);
  EXPECT_EQ(rep.elite, Elite::A);
  EXPECT_EQ(rep.s, 0);
  EXPECT_EQ(rep.index, 10u);
}

TEST(MpeSolve, HighCostAbsorbingOnBothSides) {
  const Grid g(201);
  const MpeSolution sol = mpe_solve(kBase, CostSpec::quadratic(200), g);
  const auto pts = absorbing_inaction_points(sol);
  bool below = false, above = false;
  for (std::size_t i : pts) {
    below |= i < g.mid_index();
    above |= i > g.mid_index();
  }
  EXPECT_TRUE(below && above);
}

TEST(MpeSolve, LowCostMedianAbsorbing) {
  const Grid g(201);
  const MpeSolution sol = mpe_solve(kBase, CostSpec::quadratic(0.5), g);
  const std::size_t m = g.mid_index();
  for (Elite e : {Elite::A, Elite::B}) {
    for (Binary s = 0; s < 2; ++s) {
      EXPECT_EQ(sol.sigma(e)[s][m], m);
      const Binary want = preferred_policy(e, s);
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (implemented_policy(g[i], want) != want) {
          EXPECT_EQ(sol.sigma(e)[s][i], m) << i;
        }
      }
    }
  }
}

TEST(MpeSolve, ThreadedMatchesSerial) {
  const Grid g(101);
  MpeOptions opts;
  const MpeSolution a = mpe_solve(kBase, kTen, g, opts);
  opts.threads = 3;
  const MpeSolution b = mpe_solve(kBase, kTen, g, opts);
  EXPECT_EQ(a.vA, b.vA);
  EXPECT_EQ(a.sigmaB, b.sigmaB);
  EXPECT_EQ(a.cycle_period, b.cycle_period);
}

TEST(MpeSolve, RejectsShortHorizon) {
  MpeOptions opts;
  opts.horizon = 1;
  EXPECT_THROW(mpe_solve(kBase, kTen, Grid(11), opts), std::invalid_argument);
}

TEST(MpeSolve, TurnsToMedianAtZeroCost) {
  const Grid g(101);
  const MpeSolution sol = zero_cost_mpe(kBase, g);
  EXPECT_EQ(turns_to_median(sol, g.mid_index(), 4), 0u);
  // From 0 with A moving first, one draw makes B move next: A (aligned,
  // s=0) stays, B (aligned, s=1) stays, ... so the worst case never ends.
  EXPECT_EQ(turns_to_median(sol, 0, 6), 7u);
}
