#pragma once

// Grid argmax with the shared tie-breaking rule used by every grid solver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace polarsolve {

/// Residual preference among choices that tie on value, movement and
/// distance to 1/2. This can only happen when moving from 1/2 itself.
enum class TieSide { Low, High };

/// Relative tolerance under which two objective values count as tied.
inline constexpr double kTieTolerance = 1e-12;

inline double tie_band(double best) { return kTieTolerance * std::max(1.0, std::fabs(best)); }

struct Choice {
  std::size_t index = 0;
  double value = 0.0;  // the maximum, not the value at `index` (they differ by < tie_band)
};

/// Maximizes gain[j] - step_cost[|j - from|] over grid indices j.
///
/// Among choices within tie_band of the maximum: minimal movement, then
/// closest to the midpoint, then `side`. The selection only depends on the
/// set of near-maximal choices, never on scan order.
inline Choice select_best(std::span<const double> gain, std::span<const double> step_cost,
                          std::size_t from, std::size_t mid, TieSide side) {
  const std::size_t n = gain.size();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t d = j > from ? j - from : from - j;
    const double v = gain[j] - step_cost[d];
    if (v > best) best = v;
  }
  const double floor = best - tie_band(best);
  for (std::size_t d = 0; d < n; ++d) {
    const bool has_low = d <= from;
    const bool has_high = from + d < n;
    if (!has_low && !has_high) break;
    const bool low_ok = has_low && gain[from - d] - step_cost[d] >= floor;
    const bool high_ok = has_high && d > 0 && gain[from + d] - step_cost[d] >= floor;
    if (!low_ok && !high_ok) continue;
    if (low_ok && !high_ok) return {from - d, best};
    if (high_ok && !low_ok) return {from + d, best};
    const std::size_t lo = from - d;
    const std::size_t hi = from + d;
    const std::size_t lo_gap = lo > mid ? lo - mid : mid - lo;
    const std::size_t hi_gap = hi > mid ? hi - mid : mid - hi;
    if (lo_gap < hi_gap) return {lo, best};
    if (hi_gap < lo_gap) return {hi, best};
    return {side == TieSide::Low ? lo : hi, best};
  }
  return {from, best};  // unreachable: the maximizer itself is within the band
}

/// step_cost[d] = c(d * step) for d = 0..n-1. Indexing the cost by the
/// number of grid steps keeps mirrored moves bit-identical.
template <class Cost>
std::vector<double> step_costs(const Cost& cost, std::size_t n) {
  std::vector<double> out(n);
  const auto denom = static_cast<double>(n - 1);
  for (std::size_t d = 0; d < n; ++d) {
    out[d] = cost(static_cast<double>(d) / denom);
  }
  return out;
}

}  // namespace polarsolve
