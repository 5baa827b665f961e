#pragma once

/// Two opposed elites: elite A wants the policy to match the state, elite B
/// wants it to mismatch. Covers the two-period Stackelberg game and the
/// alternating-mover Markov-perfect equilibrium computed by backward
/// induction on a grid.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "polarsolve/choice.hpp"
#include "polarsolve/grid.hpp"
#include "polarsolve/model.hpp"
#include "polarsolve/parallel.hpp"
#include "polarsolve/single_elite.hpp"

namespace polarsolve {

enum class Elite { A, B };

/// Policy elite e wants in state s.
inline Binary preferred_policy(Elite e, Binary s) { return e == Elite::A ? s : 1 - s; }

/// u_e(y, s).
inline double elite_payoff(Elite e, Binary y, Binary s, double H) { return y == preferred_policy(e, s) ? H : 0.0; }

// ---------------------------------------------------------------------------
// Two-period Stackelberg game
// ---------------------------------------------------------------------------

/// Elite B's period-2 move: keep p1 if the standing policy already suits B,
/// otherwise move to 1/2 when that is strictly cheaper than H. At exactly
/// |1/2 - p1| = Delta B stays. At p1 = 1/2 B is the mover and picks its own
/// policy for free.
inline double elite_b_response(const ModelParams& params, const CostSpec& cost, double p1, Binary s2) {
  const Binary want = preferred_policy(Elite::B, s2);
  if (implemented_policy(p1, want) == want) return p1;
  const double delta = delta_threshold(cost, params.H);
  return std::fabs(kHalf - p1) < delta ? kHalf : p1;
}

/// Elite A's expected period-2 payoff from leaving p0 to B.
inline double phi_continuation(const ModelParams& params, const CostSpec& cost, double p0) {
  const double delta = delta_threshold(cost, params.H);
  if (p0 <= kHalf - delta) return (1.0 - params.pi) * params.H;
  if (p0 >= kHalf + delta) return params.pi * params.H;
  return 0.0;
}

struct StackelbergSolution {
  double chosen = 0.0;
  double value = 0.0;
  std::vector<CandidateEvaluation> candidates;  // Inaction, Median, SemiLockRight, SemiLockLeft
  double phi_at_p0 = 0.0;
};

/// Elite A's period-1 choice among {p0, 1/2, 1/2 + Delta, 1/2 - Delta}.
/// Semi-lock points outside [0,1] are marked infeasible.
inline StackelbergSolution stackelberg_solve(const ModelParams& params, const CostSpec& cost, double p0,
                                             Binary s1) {
  const double H = params.H;
  const double beta = params.beta;
  const double delta = delta_threshold(cost, H);
  StackelbergSolution out;
  out.phi_at_p0 = phi_continuation(params, cost, p0);

  const double inaction = elite_payoff(Elite::A, implemented_policy(p0, s1), s1, H) + beta * out.phi_at_p0;
  const double median = H - cost(p0 - kHalf);
  const double right = kHalf + delta;
  const double left = kHalf - delta;
  const bool right_ok = right <= 1.0;
  const bool left_ok = left >= 0.0;
  const double right_value =
      right_ok ? elite_payoff(Elite::A, 1, s1, H) - cost(right - p0) + beta * params.pi * H : -kInfinity;
  const double left_value =
      left_ok ? elite_payoff(Elite::A, 0, s1, H) - cost(p0 - left) + beta * (1.0 - params.pi) * H : -kInfinity;

  out.candidates = {
      {p0, inaction, Provenance::Inaction, true},
      {kHalf, median, Provenance::Median, true},
      {right_ok ? right : 1.0, right_value, Provenance::SemiLockRight, right_ok},
      {left_ok ? left : 0.0, left_value, Provenance::SemiLockLeft, left_ok},
  };
  const auto& pick = detail::pick_candidate(out.candidates, p0);
  out.chosen = pick.candidate;
  out.value = pick.objective;
  return out;
}

// ---------------------------------------------------------------------------
// Markov-perfect equilibrium
// ---------------------------------------------------------------------------

struct MpeSolution;

inline constexpr std::size_t kMaxCyclePeriod = 64;

struct MpeOptions {
  std::size_t horizon = 600;
  double residual_tol = 1e-9;
  unsigned threads = 1;
  std::function<void(const MpeSolution&)> on_step;  // called after every backward step
};

/// Mover values V_{e,s}, waiting values U_e and mover policies (grid
/// indices) for both elites.
struct MpeSolution {
  Grid grid;
  std::array<std::vector<double>, 2> vA, vB;
  std::vector<double> uA, uB;
  std::array<std::vector<std::size_t>, 2> sigmaA, sigmaB;
  std::size_t horizon_used = 0;
  double residual = 0.0;        // sup-norm change in the last step
  bool converged = false;       // stationary profile reached
  std::size_t cycle_period = 0; // 1 stationary, P >= 2 exact P-cycle, 0 neither
  double cycle_residual = 0.0;  // distance to the solution cycle_period steps back

  explicit MpeSolution(Grid g) : grid(std::move(g)) {
    const std::size_t n = grid.size();
    for (Binary s = 0; s < 2; ++s) {
      vA[s].assign(n, 0.0);
      vB[s].assign(n, 0.0);
      sigmaA[s].assign(n, 0);
      sigmaB[s].assign(n, 0);
    }
    uA.assign(n, 0.0);
    uB.assign(n, 0.0);
  }

  [[nodiscard]] auto& v(Elite e) { return e == Elite::A ? vA : vB; }
  [[nodiscard]] const auto& v(Elite e) const { return e == Elite::A ? vA : vB; }
  [[nodiscard]] auto& u(Elite e) { return e == Elite::A ? uA : uB; }
  [[nodiscard]] const auto& u(Elite e) const { return e == Elite::A ? uA : uB; }
  [[nodiscard]] auto& sigma(Elite e) { return e == Elite::A ? sigmaA : sigmaB; }
  [[nodiscard]] const auto& sigma(Elite e) const { return e == Elite::A ? sigmaA : sigmaB; }
};

namespace detail {

inline Elite rival(Elite e) { return e == Elite::A ? Elite::B : Elite::A; }

/// Elite B mirrors elite A, so its residual tie-break points the other way.
inline TieSide tie_side(Elite e) { return e == Elite::A ? TieSide::Low : TieSide::High; }

/// gain[j] for the mover: own stage payoff at p_j (mover wins the
/// knife-edge) plus beta times its waiting value there.
inline std::vector<double> mover_gain(const ModelParams& params, const Grid& grid, Elite e, Binary s,
                                      const std::vector<double>& waiting) {
  std::vector<double> gain(grid.size());
  const Binary want = preferred_policy(e, s);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    gain[j] = elite_payoff(e, implemented_policy(grid[j], want), s, params.H) + params.beta * waiting[j];
  }
  return gain;
}

/// Value to elite e of the rival moving from p_i to `to` in state s':
/// stage payoff under the rival's knife-edge choice, then e's expected mover
/// value.
inline double waiting_term(const ModelParams& params, const Grid& grid, Elite e, Binary s_prime, std::size_t to,
                           const std::array<std::vector<double>, 2>& v_e) {
  const Binary y = implemented_policy(grid[to], preferred_policy(rival(e), s_prime));
  return elite_payoff(e, y, s_prime, params.H) +
         params.beta * (params.pi * v_e[1][to] + (1.0 - params.pi) * v_e[0][to]);
}

inline double waiting_value(const ModelParams& params, const Grid& grid, Elite e, std::size_t i,
                            const std::array<std::vector<double>, 2>& v_e,
                            const std::array<std::vector<std::size_t>, 2>& sigma_rival) {
  return params.pi * waiting_term(params, grid, e, 1, sigma_rival[1][i], v_e) +
         (1.0 - params.pi) * waiting_term(params, grid, e, 0, sigma_rival[0][i], v_e);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

/// Sup-norm distance over the six value tables, and whether all four
/// policies coincide.
inline std::pair<double, bool> step_distance(const MpeSolution& a, const MpeSolution& b) {
  double residual = 0.0;
  bool same = true;
  for (Elite e : {Elite::A, Elite::B}) {
    for (Binary s = 0; s < 2; ++s) {
      residual = std::max(residual, max_abs_diff(a.v(e)[s], b.v(e)[s]));
      same = same && a.sigma(e)[s] == b.sigma(e)[s];
    }
    residual = std::max(residual, max_abs_diff(a.u(e), b.u(e)));
  }
  return {residual, same};
}

}  // namespace detail

/// Backward induction on the alternating-mover Bellman system from zero
/// terminal values. Each step (1) recomputes both movers' values and
/// policies against the current waiting values, then (2) recomputes the
/// waiting values from the new mover values and the rival's new policy.
///
/// Stops early once every value table moves by at most residual_tol and no
/// policy changed (stationary, cycle_period = 1). Otherwise all `horizon`
/// steps run and the result is compared with the last few steps to detect
/// an exact periodic orbit (cycle_period = 2..kMaxCyclePeriod, else 0).
inline MpeSolution mpe_solve(const ModelParams& params, const CostSpec& cost, const Grid& grid,
                             const MpeOptions& opts = {}) {
  params.validate();
  if (opts.horizon < 2) throw std::invalid_argument("MPE horizon must be >= 2");
  const std::size_t n = grid.size();
  const auto steps = step_costs(cost, n);
  MpeSolution sol(grid);
  sol.residual = kInfinity;
  std::deque<MpeSolution> history;  // most recent first, excluding sol

  for (std::size_t t = 0; t < opts.horizon; ++t) {
    MpeSolution next(grid);
    for (Elite e : {Elite::A, Elite::B}) {
      for (Binary s = 0; s < 2; ++s) {
        const auto gain = detail::mover_gain(params, grid, e, s, sol.u(e));
        auto& v = next.v(e)[s];
        auto& sigma = next.sigma(e)[s];
        parallel_for(n, opts.threads, [&](std::size_t begin, std::size_t end) {
          for (std::size_t i = begin; i < end; ++i) {
            const Choice c = select_best(gain, steps, i, grid.mid_index(), detail::tie_side(e));
            v[i] = c.value;
            sigma[i] = c.index;
          }
        });
      }
    }
    for (Elite e : {Elite::A, Elite::B}) {
      for (std::size_t i = 0; i < n; ++i) {
        next.u(e)[i] = detail::waiting_value(params, grid, e, i, next.v(e), next.sigma(detail::rival(e)));
      }
    }

    const auto [residual, same_policies] = detail::step_distance(next, sol);
    next.horizon_used = t + 1;
    next.residual = residual;
    history.push_front(std::move(sol));
    if (history.size() > kMaxCyclePeriod) history.pop_back();
    sol = std::move(next);
    if (opts.on_step) opts.on_step(sol);
    if (residual <= opts.residual_tol && same_policies && t > 0) {
      sol.converged = true;
      sol.cycle_period = 1;
      return sol;
    }
  }
  // history[P-1] is the solution P steps before the final one.
  for (std::size_t period = 2; period <= history.size(); ++period) {
    const auto [gap, same_policies] = detail::step_distance(sol, history[period - 1]);
    if (gap <= opts.residual_tol && same_policies) {
      sol.cycle_period = period;
      sol.cycle_residual = gap;
      break;
    }
  }
  return sol;
}

struct DeviationReport {
  double max_gain = 0.0;     // best one-step deviation minus value of the recorded policy
  double value_gap = 0.0;    // |recorded V - value of the recorded policy|
  double waiting_gap = 0.0;  // |recorded U - U rebuilt from recorded V and rival policy|
  Elite elite = Elite::A;
  Binary s = 0;
  std::size_t index = 0;  // location of max_gain
};

/// Re-optimizes every mover entry against the solution's own waiting values
/// and reports how much a one-step deviation from the recorded policy gains.
inline DeviationReport check_no_deviation(const ModelParams& params, const CostSpec& cost, const MpeSolution& sol) {
  const Grid& grid = sol.grid;
  const std::size_t n = grid.size();
  const auto steps = step_costs(cost, n);
  DeviationReport rep;
  for (Elite e : {Elite::A, Elite::B}) {
    for (Binary s = 0; s < 2; ++s) {
      const auto gain = detail::mover_gain(params, grid, e, s, sol.u(e));
      for (std::size_t i = 0; i < n; ++i) {
        double best = -kInfinity;
        for (std::size_t j = 0; j < n; ++j) {
          best = std::max(best, gain[j] - steps[j > i ? j - i : i - j]);
        }
        const std::size_t chosen = sol.sigma(e)[s][i];
        const double followed = gain[chosen] - steps[chosen > i ? chosen - i : i - chosen];
        const double dev = best - followed;
        if (dev > rep.max_gain) {
          rep.max_gain = dev;
          rep.elite = e;
          rep.s = s;
          rep.index = i;
        }
        rep.value_gap = std::max(rep.value_gap, std::fabs(sol.v(e)[s][i] - followed));
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double rebuilt = detail::waiting_value(params, grid, e, i, sol.v(e), sol.sigma(detail::rival(e)));
      rep.waiting_gap = std::max(rep.waiting_gap, std::fabs(sol.u(e)[i] - rebuilt));
    }
  }
  return rep;
}

/// Grid points left unchanged by both elites in both states.
inline std::vector<std::size_t> absorbing_inaction_points(const MpeSolution& sol) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    if (sol.sigmaA[0][i] == i && sol.sigmaA[1][i] == i && sol.sigmaB[0][i] == i && sol.sigmaB[1][i] == i) {
      out.push_back(i);
    }
  }
  return out;
}

/// Worst case, over all state draws, of the number of mover turns (A moves
/// first) needed to reach 1/2 from grid index `start`; max_turns + 1 if some
/// draw sequence does not reach it within max_turns.
inline std::size_t turns_to_median(const MpeSolution& sol, std::size_t start, std::size_t max_turns) {
  const std::size_t mid = sol.grid.mid_index();
  auto worst = [&](auto&& self, std::size_t i, Elite mover, std::size_t depth) -> std::size_t {
    if (i == mid) return 0;
    if (depth == max_turns) return max_turns + 1;
    std::size_t w = 0;
    for (Binary s = 0; s < 2; ++s) {
      const std::size_t next = sol.sigma(mover)[s][i];
      w = std::max(w, 1 + self(self, next, detail::rival(mover), depth + 1));
    }
    return std::min(w, max_turns + 1);
  };
  return worst(worst, start, Elite::A, 0);
}

/// Closed-form equilibrium with free persuasion (k = 0): every mover reaches
/// its policy at zero cost, so V = H + beta*U and U = beta*V.
inline MpeSolution zero_cost_mpe(const ModelParams& params, const Grid& grid) {
  MpeSolution sol(grid);
  const double H = params.H;
  const double beta = params.beta;
  const double u = beta * H / (1.0 - beta * beta);
  const double v = H + beta * u;
  const std::size_t mid = grid.mid_index();
  for (Elite e : {Elite::A, Elite::B}) {
    sol.u(e).assign(grid.size(), u);
    for (Binary s = 0; s < 2; ++s) {
      sol.v(e)[s].assign(grid.size(), v);
      const Binary want = preferred_policy(e, s);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        sol.sigma(e)[s][i] = implemented_policy(grid[i], want) == want ? i : mid;
      }
    }
  }
  sol.converged = true;
  sol.cycle_period = 1;
  return sol;
}

}  // namespace polarsolve
