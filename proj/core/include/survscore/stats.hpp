#pragma once

#include <cmath>
#include <span>

namespace survscore {

/// Quantile by linear interpolation between order statistics (R type 7):
/// position h = (n-1)q into the sorted sample, interpolated linearly.
inline double quantile_type7(std::span<const double> sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = static_cast<double>(n - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

} // namespace survscore
