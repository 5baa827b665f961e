#pragma once

// Side-by-side comparison of the closed-form two-period solvers against the
// brute-force oracles over a scan of starting shares.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "polarsolve/grid.hpp"
#include "polarsolve/model.hpp"
#include "polarsolve/oracle.hpp"
#include "polarsolve/single_elite.hpp"
#include "polarsolve/two_elite.hpp"

namespace polarsolve {

enum class OracleCheck { Period2, Period1, Stackelberg };

inline const char* to_string(OracleCheck c) {
  switch (c) {
    case OracleCheck::Period2: return "period2";
    case OracleCheck::Period1: return "period1";
    case OracleCheck::Stackelberg: return "stackelberg";
  }
  return "?";
}

/// Value tolerances. Period 2 is exact on aligned grids; the others are
/// limited by the oracle grid resolution.
inline double oracle_value_tolerance(OracleCheck c) {
  switch (c) {
    case OracleCheck::Period2: return 1e-12;
    case OracleCheck::Period1: return 2e-4;
    case OracleCheck::Stackelberg: return 2e-3;
  }
  return 0.0;
}

struct OracleRow {
  OracleCheck check = OracleCheck::Period2;
  Binary s = 0;
  double p = 0.0;
  double closed_value = 0.0;
  double oracle_value = 0.0;
  double closed_argmax = 0.0;
  double oracle_argmax = 0.0;
  bool argmax_ok = true;  // period2 only; elsewhere argmax is reported, not gated
  bool pull_ok = true;    // period1 only: |p' - 1/2| <= |p - 1/2|

  [[nodiscard]] double value_diff() const { return std::fabs(closed_value - oracle_value); }
  [[nodiscard]] double argmax_diff() const { return std::fabs(closed_argmax - oracle_argmax); }
  [[nodiscard]] bool ok() const { return value_diff() <= oracle_value_tolerance(check) && argmax_ok && pull_ok; }
};

struct OracleSummary {
  OracleCheck check = OracleCheck::Period2;
  std::size_t rows = 0;
  std::size_t failures = 0;
  double max_value_diff = 0.0;
  double max_argmax_diff = 0.0;
};

/// Scan points must lie on the oracle grid so inaction is representable.
inline void require_aligned(const Grid& scan, const Grid& oracle_grid) {
  if ((oracle_grid.size() - 1) % (scan.size() - 1) != 0) {
    throw std::invalid_argument("oracle grid (n=" + std::to_string(oracle_grid.size()) +
                                ") must refine the scan grid (n=" + std::to_string(scan.size()) + ")");
  }
}

inline std::vector<OracleRow> check_period2(const ModelParams& params, const CostSpec& cost, const Grid& scan,
                                            const Grid& oracle_grid) {
  require_aligned(scan, oracle_grid);
  std::vector<OracleRow> rows;
  for (Binary s = 0; s < 2; ++s) {
    for (double p : scan.points()) {
      auto objective = [&](double x) { return stage_payoff(s, x, params.H) - cost(x - p); };
      const Move closed = period2_solve(params, cost, p, s);
      const OracleResult o = brute_force_one_step(objective, oracle_grid);
      OracleRow r{OracleCheck::Period2, s, p, closed.value, o.value, closed.p_next, o.argmax};
      // Under ties the oracle keeps the lowest index, so an argmax mismatch is
      // fine if the closed-form point is itself an oracle maximizer.
      r.argmax_ok = r.argmax_diff() <= oracle_grid.step() ||
                    std::fabs(objective(closed.p_next) - o.value) <= tie_band(o.value);
      rows.push_back(r);
    }
  }
  return rows;
}

inline std::vector<OracleRow> check_period1(const ModelParams& params, const CostSpec& cost, const Grid& scan,
                                            const Grid& oracle_grid) {
  require_aligned(scan, oracle_grid);
  const TwoPeriodSingleOracle oracle(params, cost, oracle_grid);
  std::vector<OracleRow> rows;
  for (Binary s = 0; s < 2; ++s) {
    for (double p : scan.points()) {
      const Period1Result closed = period1_solve(params, cost, p, s);
      const OracleResult o = oracle.solve(p, s);
      OracleRow r{OracleCheck::Period1, s, p, closed.value, o.value, closed.p_next, o.argmax};
      r.pull_ok = std::fabs(closed.p_next - kHalf) <= std::fabs(p - kHalf);
      rows.push_back(r);
    }
  }
  return rows;
}

inline std::vector<OracleRow> check_stackelberg(const ModelParams& params, const CostSpec& cost, const Grid& scan,
                                                const Grid& oracle_grid) {
  require_aligned(scan, oracle_grid);
  const StackelbergOracle oracle(params, cost, oracle_grid);
  std::vector<OracleRow> rows;
  for (Binary s = 0; s < 2; ++s) {
    for (double p : scan.points()) {
      const StackelbergSolution closed = stackelberg_solve(params, cost, p, s);
      const OracleResult o = oracle.solve(p, s);
      rows.push_back({OracleCheck::Stackelberg, s, p, closed.value, o.value, closed.chosen, o.argmax});
    }
  }
  return rows;
}

inline OracleSummary summarize(OracleCheck check, const std::vector<OracleRow>& rows) {
  OracleSummary out{check};
  for (const auto& r : rows) {
    if (r.check != check) continue;
    ++out.rows;
    if (!r.ok()) ++out.failures;
    out.max_value_diff = std::max(out.max_value_diff, r.value_diff());
    out.max_argmax_diff = std::max(out.max_argmax_diff, r.argmax_diff());
  }
  return out;
}

}  // namespace polarsolve
