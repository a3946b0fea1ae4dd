#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace survscore {

/// Right-continuous piecewise-constant function over time: evaluation at t
/// returns the value at the greatest knot <= t, or `initial_value` if t lies
/// before the first knot. Knots are strictly increasing.
struct StepFunction {
  std::vector<double> knots;
  std::vector<double> values;
  double initial_value = 0.0;

  double operator()(double t) const {
    auto it = std::upper_bound(knots.begin(), knots.end(), t);
    if (it == knots.begin()) return initial_value;
    return values[static_cast<std::size_t>(it - knots.begin()) - 1];
  }

  std::size_t size() const { return knots.size(); }
  bool empty() const { return knots.empty(); }

  bool well_formed() const {
    if (knots.size() != values.size()) return false;
    for (std::size_t i = 1; i < knots.size(); ++i)
      if (!(knots[i - 1] < knots[i])) return false;
    return true;
  }
};

} // namespace survscore
