#pragma once

/// Model primitives shared by every solver: parameters, persuasion cost,
/// majority rule with mover tie-breaking, stage payoffs and polarization
/// indices.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polarsolve {

/// Binary state of the world / policy.
using Binary = int;

inline constexpr double kHalf = 0.5;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Economic primitives.
///   pi   : Pr(s = 1) each period, in (0,1)
///   beta : discount factor, in (0,1)
///   H    : per-period payoff from implementing the preferred policy, > 0
struct ModelParams {
  double pi = 0.5;
  double beta = 0.9;
  double H = 1.0;

  void validate() const {
    if (!(pi > 0.0 && pi < 1.0)) {
      throw std::invalid_argument("pi must lie in (0,1), got " + std::to_string(pi));
    }
    if (!(beta > 0.0 && beta < 1.0)) {
      throw std::invalid_argument("beta must lie in (0,1), got " + std::to_string(beta));
    }
    if (!(H > 0.0) || !std::isfinite(H)) {
      throw std::invalid_argument("H must be positive, got " + std::to_string(H));
    }
  }

  /// Probability of state s.
  [[nodiscard]] double prob(Binary s) const { return s == 1 ? pi : 1.0 - pi; }

  /// Upper bound on any discounted value, H/(1-beta).
  [[nodiscard]] double value_bound() const { return H / (1.0 - beta); }
};

/// Share of the public supporting policy 1 together with the world state.
struct PublicState {
  double p = kHalf;
  Binary s = 0;

  PublicState(double share, Binary state) : p(share), s(state) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("public share must lie in [0,1]");
    }
    if (s != 0 && s != 1) {
      throw std::invalid_argument("state must be 0 or 1");
    }
  }
};

/// Persuasion cost c(x): symmetric, zero at zero, strictly increasing in |x|
/// and strictly convex.
///
/// Two kinds exist. Quadratic evaluates k*x^2 analytically. Tabulated holds
/// c on 2001 equally spaced displacements over [0,1] and interpolates
/// linearly between nodes; the table is validated for monotonicity and
/// convexity when constructed.
class CostSpec {
 public:
  enum class Kind { Quadratic, Tabulated };

  static constexpr std::size_t kTableSize = 2001;

  static CostSpec quadratic(double k) {
    if (!(k >= 0.0) || !std::isfinite(k)) {
      throw std::invalid_argument("quadratic cost curvature k must be >= 0, got " + std::to_string(k));
    }
    CostSpec c;
    c.kind_ = Kind::Quadratic;
    c.k_ = k;
    return c;
  }

  /// Values at displacements i/(kTableSize-1), i = 0..kTableSize-1.
  static CostSpec tabulated(std::vector<double> values) {
    if (values.size() != kTableSize) {
      throw std::invalid_argument("tabulated cost needs exactly " + std::to_string(kTableSize) +
                                  " values, got " + std::to_string(values.size()));
    }
    if (values.front() != 0.0) {
      throw std::invalid_argument("tabulated cost must satisfy c(0) = 0");
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (!std::isfinite(values[i]) || !(values[i] > values[i - 1])) {
        throw std::invalid_argument("tabulated cost must be strictly increasing (node " +
                                    std::to_string(i) + ")");
      }
      if (i >= 2 && !(values[i] - values[i - 1] > values[i - 1] - values[i - 2])) {
        throw std::invalid_argument("tabulated cost must be strictly convex (node " +
                                    std::to_string(i) + ")");
      }
    }
    CostSpec c;
    c.kind_ = Kind::Tabulated;
    c.table_ = std::move(values);
    return c;
  }

  /// Samples a callable on the table nodes.
  template <class F>
  static CostSpec tabulate(F&& f) {
    std::vector<double> values(kTableSize);
    for (std::size_t i = 0; i < kTableSize; ++i) {
      values[i] = f(static_cast<double>(i) / static_cast<double>(kTableSize - 1));
    }
    return tabulated(std::move(values));
  }

  /// k*|x|^exponent, tabulated. exponent > 1 gives strict convexity.
  static CostSpec power(double k, double exponent) {
    if (!(k > 0.0) || !(exponent > 1.0)) {
      throw std::invalid_argument("power cost requires k > 0 and exponent > 1");
    }
    return tabulate([=](double x) { return k * std::pow(x, exponent); });
  }

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double curvature() const { return k_; }
  [[nodiscard]] std::span<const double> table() const { return table_; }

  /// c(|x|). Displacements beyond 1 in magnitude are clamped for the
  /// tabulated kind; the model never produces them.
  [[nodiscard]] double operator()(double x) const {
    const double a = std::fabs(x);
    if (kind_ == Kind::Quadratic) {
      return k_ * a * a;
    }
    const double pos = std::min(a, 1.0) * static_cast<double>(kTableSize - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo >= kTableSize - 1) {
      return table_.back();
    }
    const double frac = pos - static_cast<double>(lo);
    return table_[lo] + frac * (table_[lo + 1] - table_[lo]);
  }

 private:
  CostSpec() = default;

  Kind kind_ = Kind::Quadratic;
  double k_ = 0.0;
  std::vector<double> table_;
};

inline double evaluate_cost(const CostSpec& cost, double x) { return cost(x); }

/// Delta = c^{-1}(H): the largest opinion shift worth paying for a
/// one-period policy flip. Returns +infinity when c(1) < H, in which case
/// every semi-lock point lies outside [0,1].
inline double delta_threshold(const CostSpec& cost, double H) {
  if (!(H > 0.0)) {
    throw std::invalid_argument("delta_threshold requires H > 0");
  }
  if (cost(1.0) < H) {
    return kInfinity;
  }
  if (cost.kind() == CostSpec::Kind::Quadratic) {
    return std::sqrt(H / cost.curvature());
  }
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (cost(mid) < H) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Majority rule: policy 1 iff p > 1/2; at exactly 1/2 the mover picks.
inline Binary implemented_policy(double p, Binary mover_preferred) {
  if (p > kHalf) return 1;
  if (p < kHalf) return 0;
  return mover_preferred;
}

/// R(s, p'): H when the implemented policy matches s, with the mover
/// getting its preference at the knife-edge p' = 1/2.
inline double stage_payoff(Binary s, double p_next, double H) {
  return implemented_policy(p_next, s) == s ? H : 0.0;
}

struct PolarizationReport {
  double distance_index = 0.0;  // 1/2 - |p - 1/2|
  double variance_index = 0.0;  // p(1-p)
};

inline PolarizationReport polarization_indices(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("polarization_indices: p must lie in [0,1]");
  }
  return {kHalf - std::fabs(p - kHalf), p * (1.0 - p)};
}

/// True iff c_tilde has strictly larger increments than c on every adjacent
/// pair of samples. Adjacent dominance implies dominance for all pairs.
inline bool cost_dominates(const CostSpec& c_tilde, const CostSpec& c, std::span<const double> samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("cost_dominates needs at least two samples");
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i] > samples[i - 1])) {
      throw std::invalid_argument("cost_dominates: samples must be strictly ascending");
    }
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double lo = samples[i - 1];
    const double hi = samples[i];
    if (!(c_tilde(hi) - c_tilde(lo) > c(hi) - c(lo))) {
      return false;
    }
  }
  return true;
}

/// Uniform samples 0, step, ..., 1 used as the default dominance check set.
inline std::vector<double> dominance_samples(double step = 0.05) {
  std::vector<double> xs;
  const auto n = static_cast<std::size_t>(std::llround(1.0 / step));
  xs.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    xs.push_back(static_cast<double>(i) / static_cast<double>(n));
  }
  return xs;
}

}  // namespace polarsolve
