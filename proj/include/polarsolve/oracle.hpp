#pragma once

// Brute-force maximizers over an oracle grid. Written against the model
// primitives only (payoff, cost, majority rule) so they can check the
// closed-form solvers independently. Ties go to the lowest grid index.

#include <cstddef>
#include <vector>

#include "polarsolve/grid.hpp"
#include "polarsolve/model.hpp"

namespace polarsolve {

struct OracleResult {
  double argmax = 0.0;
  double value = 0.0;
  std::size_t evaluations = 0;
};

inline constexpr std::size_t kDefaultOracleSize = 2001;

template <class Objective>
OracleResult brute_force_one_step(Objective&& objective, const Grid& grid) {
  OracleResult r{grid[0], objective(grid[0]), 1};
  for (std::size_t j = 1; j < grid.size(); ++j) {
    const double v = objective(grid[j]);
    ++r.evaluations;
    if (v > r.value) {
      r.value = v;
      r.argmax = grid[j];
    }
  }
  return r;
}

/// Two-period single-elite problem solved by enumeration in both periods.
/// The period-2 expected best-response value depends only on p1, so it is
/// tabulated once per oracle and reused across queries.
class TwoPeriodSingleOracle {
 public:
  TwoPeriodSingleOracle(const ModelParams& params, const CostSpec& cost, Grid grid)
      : params_(params), cost_(cost), grid_(std::move(grid)), continuation_(grid_.size(), 0.0) {
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const double p1 = grid_[i];
      for (Binary s2 = 0; s2 < 2; ++s2) {
        const OracleResult last = brute_force_one_step(
            [&](double p2) { return stage_payoff(s2, p2, params_.H) - cost_(p2 - p1); }, grid_);
        evaluations_ += last.evaluations;
        continuation_[i] += params_.prob(s2) * last.value;
      }
    }
  }

  [[nodiscard]] OracleResult solve(double p0, Binary s1) const {
    std::size_t j = 0;
    OracleResult r = brute_force_one_step(
        [&](double p1) {
          return stage_payoff(s1, p1, params_.H) - cost_(p1 - p0) + params_.beta * continuation_[j++];
        },
        grid_);
    r.evaluations += evaluations_;
    return r;
  }

  [[nodiscard]] const Grid& grid() const { return grid_; }

 private:
  ModelParams params_;
  CostSpec cost_;
  Grid grid_;
  std::vector<double> continuation_;
  std::size_t evaluations_ = 0;
};

inline OracleResult brute_force_two_period_single(const ModelParams& params, const CostSpec& cost, double p0,
                                                  Binary s1, const Grid& oracle_grid) {
  return TwoPeriodSingleOracle(params, cost, oracle_grid).solve(p0, s1);
}

/// Two-period leader/follower game solved by enumeration. For every p1 the
/// follower (elite B, preferring 1 - s2) picks its own best grid point; the
/// leader's continuation is its payoff under that response.
class StackelbergOracle {
 public:
  StackelbergOracle(const ModelParams& params, const CostSpec& cost, Grid grid)
      : params_(params), cost_(cost), grid_(std::move(grid)), continuation_(grid_.size(), 0.0) {
    const double H = params_.H;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const double p1 = grid_[i];
      for (Binary s2 = 0; s2 < 2; ++s2) {
        const Binary follower_wants = 1 - s2;
        const OracleResult follow = brute_force_one_step(
            [&](double p2) {
              const Binary y = implemented_policy(p2, follower_wants);
              return (y == follower_wants ? H : 0.0) - cost_(p2 - p1);
            },
            grid_);
        evaluations_ += follow.evaluations;
        const Binary y = implemented_policy(follow.argmax, follower_wants);
        continuation_[i] += params_.prob(s2) * (y == s2 ? H : 0.0);
      }
    }
  }

  [[nodiscard]] OracleResult solve(double p0, Binary s1) const {
    std::size_t j = 0;
    OracleResult r = brute_force_one_step(
        [&](double p1) {
          const double stage = implemented_policy(p1, s1) == s1 ? params_.H : 0.0;
          return stage - cost_(p1 - p0) + params_.beta * continuation_[j++];
        },
        grid_);
    r.evaluations += evaluations_;
    return r;
  }

  [[nodiscard]] const Grid& grid() const { return grid_; }

 private:
  ModelParams params_;
  CostSpec cost_;
  Grid grid_;
  std::vector<double> continuation_;
  std::size_t evaluations_ = 0;
};

inline OracleResult brute_force_stackelberg(const ModelParams& params, const CostSpec& cost, double p0, Binary s1,
                                            const Grid& oracle_grid) {
  return StackelbergOracle(params, cost, oracle_grid).solve(p0, s1);
}

}  // namespace polarsolve
