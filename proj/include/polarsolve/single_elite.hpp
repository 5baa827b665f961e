#pragma once

/// Single-elite solvers: the exact two-period solution, infinite-horizon
/// value iteration on a grid, and the cost-technology comparison.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarsolve/choice.hpp"
#include "polarsolve/grid.hpp"
#include "polarsolve/model.hpp"
#include "polarsolve/parallel.hpp"

namespace polarsolve {

// ---------------------------------------------------------------------------
// Two-period model
// ---------------------------------------------------------------------------

/// Cutoffs p0* = 1/2 - Delta and p1* = 1/2 + Delta splitting [0,1] into
/// A = [0,p0*], B = [p0*,1/2], C = [1/2,p1*], D = [p1*,1]. With an infinite
/// Delta the outer regions are empty.
struct RegionPartition {
  double delta = kInfinity;
  double p0_star = -kInfinity;
  double p1_star = kInfinity;

  enum class Region { A, B, C, D };

  /// Boundary points belong to the inner region (B or C).
  [[nodiscard]] Region region(double p) const {
    if (p < p0_star) return Region::A;
    if (p <= kHalf) return Region::B;
    if (p <= p1_star) return Region::C;
    return Region::D;
  }

  /// Feasible part of B and C inside [0,1].
  [[nodiscard]] double b_lower() const { return std::max(0.0, p0_star); }
  [[nodiscard]] double c_upper() const { return std::min(1.0, p1_star); }
};

inline RegionPartition make_regions(const ModelParams& params, const CostSpec& cost) {
  const double delta = delta_threshold(cost, params.H);
  return {delta, kHalf - delta, kHalf + delta};
}

/// E_{s'}[V_{2,s'}(p')], piecewise over the four regions.
inline double expected_continuation_2(const ModelParams& params, const CostSpec& cost, double p_next) {
  const RegionPartition r = make_regions(params, cost);
  switch (r.region(p_next)) {
    case RegionPartition::Region::A:
      return params.H * (1.0 - params.pi);
    case RegionPartition::Region::B:
      return params.H - params.pi * cost(kHalf - p_next);
    case RegionPartition::Region::C:
      return params.H - (1.0 - params.pi) * cost(p_next - kHalf);
    case RegionPartition::Region::D:
      return params.H * params.pi;
  }
  return 0.0;
}

struct Move {
  double p_next = 0.0;
  double value = 0.0;
};

/// Last-period choice: stay when already on the preferred side or beyond
/// the cutoff, otherwise jump to 1/2. Exactly at the cutoff: stay.
inline Move period2_solve(const ModelParams& params, const CostSpec& cost, double p, Binary s) {
  const RegionPartition r = make_regions(params, cost);
  const double H = params.H;
  if (s == 1) {
    if (p >= kHalf) return {p, H};
    if (p > r.p0_star) return {kHalf, H - cost(kHalf - p)};
    return {p, 0.0};
  }
  if (p <= kHalf) return {p, H};
  if (p < r.p1_star) return {kHalf, H - cost(p - kHalf)};
  return {p, 0.0};
}

namespace detail {

/// Minimizes c(q - p) + weight * c(q - 1/2) over [lo, hi] by golden-section
/// search down to interval width 1e-12.
inline double golden_section(const CostSpec& cost, double p, double weight, double lo, double hi) {
  auto f = [&](double q) { return cost(q - p) + weight * cost(q - kHalf); };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > 1e-12) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

inline double interior_minimizer(const CostSpec& cost, double p, double weight, double lo, double hi) {
  if (cost.kind() == CostSpec::Kind::Quadratic) {
    const double q = (p + weight * kHalf) / (1.0 + weight);
    return std::clamp(q, lo, hi);
  }
  return golden_section(cost, p, weight, lo, hi);
}

}  // namespace detail

/// argmin over q in [p0*, 1/2] of c(q - p) + beta*pi*c(1/2 - q).
inline double interior_minimizer_B(const ModelParams& params, const CostSpec& cost, double p) {
  const RegionPartition r = make_regions(params, cost);
  return detail::interior_minimizer(cost, p, params.beta * params.pi, r.b_lower(), kHalf);
}

/// argmin over q in [1/2, p1*] of c(q - p) + beta*(1-pi)*c(q - 1/2).
inline double interior_minimizer_C(const ModelParams& params, const CostSpec& cost, double p) {
  const RegionPartition r = make_regions(params, cost);
  return detail::interior_minimizer(cost, p, params.beta * (1.0 - params.pi), kHalf, r.c_upper());
}

enum class Provenance { Inaction, InteriorB, InteriorC, Median, SemiLockRight, SemiLockLeft };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Inaction: return "inaction";
    case Provenance::InteriorB: return "interior_b";
    case Provenance::InteriorC: return "interior_c";
    case Provenance::Median: return "median";
    case Provenance::SemiLockRight: return "semi_lock_right";
    case Provenance::SemiLockLeft: return "semi_lock_left";
  }
  return "?";
}

/// One candidate move with its one-step objective value.
struct CandidateEvaluation {
  double candidate = 0.0;
  double objective = 0.0;
  Provenance provenance = Provenance::Inaction;
  bool feasible = true;
};

namespace detail {

/// Highest feasible objective; ties (within tie_band) go to the candidate
/// closest to p, then to the one closest to 1/2.
inline const CandidateEvaluation& pick_candidate(const std::vector<CandidateEvaluation>& cands, double p) {
  double best = -kInfinity;
  for (const auto& c : cands) {
    if (c.feasible) best = std::max(best, c.objective);
  }
  const double floor = best - tie_band(best);
  const CandidateEvaluation* pick = nullptr;
  for (const auto& c : cands) {
    if (!c.feasible || c.objective < floor) continue;
    if (pick == nullptr) {
      pick = &c;
      continue;
    }
    const double move = std::fabs(c.candidate - p);
    const double pick_move = std::fabs(pick->candidate - p);
    if (move < pick_move ||
        (move == pick_move && std::fabs(c.candidate - kHalf) < std::fabs(pick->candidate - kHalf))) {
      pick = &c;
    }
  }
  if (pick == nullptr) throw std::logic_error("no feasible candidate");
  return *pick;
}

}  // namespace detail

struct Period1Result {
  double p_next = 0.0;
  double value = 0.0;
  std::vector<CandidateEvaluation> candidates;
};

/// First period of the two-period problem: the optimum lies in
/// {p, p_B(p), p_C(p), 1/2}, so only those four points are evaluated.
inline Period1Result period1_solve(const ModelParams& params, const CostSpec& cost, double p, Binary s) {
  auto psi = [&](double q) {
    return stage_payoff(s, q, params.H) - cost(q - p) +
           params.beta * expected_continuation_2(params, cost, q);
  };
  Period1Result out;
  const std::array<std::pair<double, Provenance>, 4> points{{
      {p, Provenance::Inaction},
      {interior_minimizer_B(params, cost, p), Provenance::InteriorB},
      {interior_minimizer_C(params, cost, p), Provenance::InteriorC},
      {kHalf, Provenance::Median},
  }};
  for (const auto& [q, tag] : points) {
    out.candidates.push_back({q, psi(q), tag, true});
  }
  const auto& pick = detail::pick_candidate(out.candidates, p);
  out.p_next = pick.candidate;
  out.value = pick.objective;
  return out;
}

// ---------------------------------------------------------------------------
// Infinite horizon
// ---------------------------------------------------------------------------

/// V_s sampled on a grid, indexed [s][i].
struct ValueTable {
  std::array<std::vector<double>, 2> v;

  static ValueTable constant(std::size_t n, double c) { return {{std::vector<double>(n, c), std::vector<double>(n, c)}}; }
  [[nodiscard]] std::size_t size() const { return v[0].size(); }
};

/// sigma(s, p) as grid indices, indexed [s][i].
struct PolicyTable {
  std::array<std::vector<std::size_t>, 2> sigma;

  [[nodiscard]] std::size_t size() const { return sigma[0].size(); }
  [[nodiscard]] double share(const Grid& g, Binary s, std::size_t i) const { return g[sigma[s][i]]; }
};

inline double sup_distance(const ValueTable& a, const ValueTable& b) {
  double d = 0.0;
  for (int s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < a.v[s].size(); ++i) {
      d = std::max(d, std::fabs(a.v[s][i] - b.v[s][i]));
    }
  }
  return d;
}

namespace detail {

/// gain_s[j] = R(s, p_j) + beta * (pi * v1[j] + (1 - pi) * v0[j]).
inline std::array<std::vector<double>, 2> single_elite_gains(const ModelParams& params, const Grid& grid,
                                                             const ValueTable& v) {
  const std::size_t n = grid.size();
  std::array<std::vector<double>, 2> gain{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    const double cont = params.beta * (params.pi * v.v[1][j] + (1.0 - params.pi) * v.v[0][j]);
    for (Binary s = 0; s < 2; ++s) {
      gain[s][j] = stage_payoff(s, grid[j], params.H) + cont;
    }
  }
  return gain;
}

inline void check_table(const Grid& grid, const ValueTable& v) {
  if (v.v[0].size() != grid.size() || v.v[1].size() != grid.size()) {
    throw std::invalid_argument("value table size does not match grid");
  }
}

}  // namespace detail

/// One synchronous Bellman sweep (Tv). When `policy` is non-null it
/// receives the tie-broken maximizers.
inline ValueTable bellman_apply(const ModelParams& params, const CostSpec& cost, const Grid& grid,
                                const ValueTable& v, PolicyTable* policy = nullptr, unsigned threads = 1) {
  detail::check_table(grid, v);
  const std::size_t n = grid.size();
  const auto gain = detail::single_elite_gains(params, grid, v);
  const auto steps = step_costs(cost, n);
  ValueTable out = ValueTable::constant(n, 0.0);
  if (policy != nullptr) {
    policy->sigma[0].assign(n, 0);
    policy->sigma[1].assign(n, 0);
  }
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (Binary s = 0; s < 2; ++s) {
        const Choice c = select_best(gain[s], steps, i, grid.mid_index(), TieSide::Low);
        out.v[s][i] = c.value;
        if (policy != nullptr) policy->sigma[s][i] = c.index;
      }
    }
  });
  return out;
}

/// Tie-broken one-step maximizers against a fixed continuation v.
inline PolicyTable greedy_policy(const ModelParams& params, const CostSpec& cost, const Grid& grid,
                                 const ValueTable& v, unsigned threads = 1) {
  PolicyTable policy;
  (void)bellman_apply(params, cost, grid, v, &policy, threads);
  return policy;
}

struct SolveOptions {
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  unsigned threads = 1;
};

struct InfiniteSolution {
  Grid grid;
  ValueTable values;
  PolicyTable policy;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Value iteration from v = 0 until the sup-norm change is <= tol. The
/// returned policy is greedy with respect to the returned values. A run
/// that exhausts max_iter is returned with converged = false.
inline InfiniteSolution solve_infinite(const ModelParams& params, const CostSpec& cost, const Grid& grid,
                                       const SolveOptions& opts = {}) {
  params.validate();
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  ValueTable v = ValueTable::constant(grid.size(), 0.0);
  InfiniteSolution sol{grid, v, {}, kInfinity, 0, false};
  while (sol.iterations < opts.max_iter) {
    ValueTable next = bellman_apply(params, cost, grid, v, nullptr, opts.threads);
    sol.residual = sup_distance(next, v);
    v = std::move(next);
    ++sol.iterations;
    if (sol.residual <= opts.tol) {
      sol.converged = true;
      break;
    }
  }
  sol.values = std::move(v);
  sol.policy = greedy_policy(params, cost, grid, sol.values, opts.threads);
  return sol;
}

/// Iterations sufficient for ||v_n - v_{n-1}|| <= tol starting from v = 0:
/// the first sweep changes v by at most H and each later one shrinks the
/// change by beta.
inline std::size_t contraction_iteration_bound(const ModelParams& params, double tol) {
  return static_cast<std::size_t>(std::ceil(std::log(tol * (1.0 - params.beta) / params.H) / std::log(params.beta)));
}

// ---------------------------------------------------------------------------
// Structural checks
// ---------------------------------------------------------------------------

struct PullViolation {
  Binary s = 0;
  std::size_t index = 0;
  std::string kind;  // "pull", "value_peak", "policy_monotone"
};

/// Checks the peak and pull properties of a converged solution:
///   (a) min(p,1/2) <= sigma(s,p) <= max(p,1/2), exactly;
///   (b) v_s weakly increasing up to 1/2 and weakly decreasing after,
///       up to 1e-9;
///   (c) sigma(s,.) weakly increasing on each side of 1/2, with one grid
///       step of slack.
inline std::vector<PullViolation> verify_polarization_pull(const Grid& grid, const ValueTable& v,
                                                           const PolicyTable& sigma) {
  constexpr double kValueSlack = 1e-9;
  std::vector<PullViolation> out;
  const std::size_t n = grid.size();
  const std::size_t mid = grid.mid_index();
  for (Binary s = 0; s < 2; ++s) {
    const auto& vs = v.v[s];
    const auto& ps = sigma.sigma[s];
    for (std::size_t i = 0; i < n; ++i) {
      if (ps[i] < std::min(i, mid) || ps[i] > std::max(i, mid)) out.push_back({s, i, "pull"});
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const bool rising_side = i < mid;
      if (rising_side ? vs[i + 1] < vs[i] - kValueSlack : vs[i + 1] > vs[i] + kValueSlack) {
        out.push_back({s, i + 1, "value_peak"});
      }
      // Compare only within one side; the pair straddling 1/2 is allowed to jump.
      const bool same_side = (i + 1 <= mid) || (i >= mid);
      if (same_side && ps[i + 1] + 1 < ps[i]) out.push_back({s, i + 1, "policy_monotone"});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cost technologies
// ---------------------------------------------------------------------------

enum class ContinuationMode {
  Shared,         // both technologies face the base technology's converged V
  OwnFixedPoint,  // each technology uses its own converged V
};

struct ShrinkViolation {
  Binary s = 0;
  std::size_t index = 0;
  std::size_t base_choice = 0;
  std::size_t costly_choice = 0;
};

struct TechnologyComparison {
  PolicyTable base;    // maximizers under c
  PolicyTable costly;  // maximizers under c~
  std::vector<ShrinkViolation> violations;
};

/// Grid points where the policy stays put, per state.
inline std::array<std::vector<bool>, 2> inaction_mask(const PolicyTable& policy) {
  std::array<std::vector<bool>, 2> out;
  for (Binary s = 0; s < 2; ++s) {
    out[s].resize(policy.size());
    for (std::size_t i = 0; i < policy.size(); ++i) out[s][i] = policy.sigma[s][i] == i;
  }
  return out;
}

/// Fraction of grid points with sigma(s,p) != p.
inline double intervention_measure(const PolicyTable& policy, Binary s) {
  std::size_t moved = 0;
  for (std::size_t i = 0; i < policy.size(); ++i) moved += policy.sigma[s][i] != i ? 1 : 0;
  return static_cast<double>(moved) / static_cast<double>(policy.size());
}

/// Compares one-step maximizers under c and a cost-dominating c~: for
/// p <= 1/2 the costlier move must not exceed the cheaper one, for p >= 1/2
/// it must not fall below it, each with one grid step of slack.
inline TechnologyComparison compare_cost_technologies(const ModelParams& params, const CostSpec& cost_c,
                                                      const CostSpec& cost_ctilde, const Grid& grid,
                                                      ContinuationMode mode, const SolveOptions& opts = {}) {
  const auto samples = dominance_samples(0.05);
  const bool identical = [&] {
    for (double x : samples) {
      if (cost_c(x) != cost_ctilde(x)) return false;
    }
    return true;
  }();
  if (!identical && !cost_dominates(cost_ctilde, cost_c, samples)) {
    throw std::invalid_argument("compare_cost_technologies: c~ does not cost-dominate c");
  }
  TechnologyComparison out;
  const InfiniteSolution base = solve_infinite(params, cost_c, grid, opts);
  out.base = base.policy;
  if (mode == ContinuationMode::Shared) {
    out.costly = greedy_policy(params, cost_ctilde, grid, base.values, opts.threads);
  } else {
    out.costly = solve_infinite(params, cost_ctilde, grid, opts).policy;
  }
  const std::size_t mid = grid.mid_index();
  for (Binary s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const std::size_t b = out.base.sigma[s][i];
      const std::size_t t = out.costly.sigma[s][i];
      const bool bad = (i <= mid && t > b + 1) || (i >= mid && t + 1 < b);
      if (bad) out.violations.push_back({s, i, b, t});
    }
  }
  return out;
}

}  // namespace polarsolve
