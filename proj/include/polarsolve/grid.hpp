#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polarsolve {

/// Uniform odd-sized grid over [0,1] with 1/2 as an exact grid point.
///
/// The lower half is built as i/(n-1) and the upper half as the mirror
/// 1 - points[n-1-i], so 1 - points[i] == points[n-1-i] holds bit-exactly
/// for every i <= mid. Mirror comparisons elsewhere work on indices.
class Grid {
 public:
  explicit Grid(std::size_t n) {
    if (n < 3 || n % 2 == 0) {
      throw std::invalid_argument("grid size must be odd and >= 3, got " + std::to_string(n));
    }
    points_.resize(n);
    const std::size_t mid = (n - 1) / 2;
    const auto denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i <= mid; ++i) {
      points_[i] = static_cast<double>(i) / denom;
    }
    for (std::size_t i = mid + 1; i < n; ++i) {
      points_[i] = 1.0 - points_[n - 1 - i];
    }
  }

  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] std::size_t mid_index() const { return (points_.size() - 1) / 2; }
  [[nodiscard]] double step() const { return 1.0 / static_cast<double>(points_.size() - 1); }
  [[nodiscard]] double operator[](std::size_t i) const { return points_[i]; }
  [[nodiscard]] std::span<const double> points() const { return points_; }
  [[nodiscard]] std::size_t mirror(std::size_t i) const { return points_.size() - 1 - i; }

  /// Index of the closest grid point; ties go to the lower index.
  [[nodiscard]] std::size_t nearest_index(double p) const {
    const std::size_t last = points_.size() - 1;
    if (!(p > 0.0)) return 0;
    if (!(p < 1.0)) return last;
    const auto guess = static_cast<std::size_t>(std::floor(p * static_cast<double>(last)));
    std::size_t best = guess > 0 ? guess - 1 : 0;
    double best_gap = std::fabs(points_[best] - p);
    for (std::size_t i = best + 1; i <= std::min(guess + 2, last); ++i) {
      const double gap = std::fabs(points_[i] - p);
      if (gap < best_gap) {
        best = i;
        best_gap = gap;
      }
    }
    return best;
  }

  bool operator==(const Grid& other) const { return points_ == other.points_; }

 private:
  std::vector<double> points_;
};

inline Grid build_grid(std::size_t n) { return Grid(n); }

inline std::size_t nearest_index(const Grid& grid, double p) { return grid.nearest_index(p); }

}  // namespace polarsolve
