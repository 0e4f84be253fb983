#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <type_traits>
#include <vector>

namespace helixlab::numdiff {

/// First derivative of `f` at `x` from a five-point stencil of spacing `h`.
/// Falls back to one-sided stencils when the central one leaves [lo, hi].
template <class F>
auto derivative(const F& f, double x, double h, double lo, double hi) {
  using R = std::decay_t<decltype(f(x))>;  // materialize Eigen expressions
  if (hi - lo < 4.0 * h) h = (hi - lo) / 4.0;
  R r;
  if (x - 2.0 * h >= lo && x + 2.0 * h <= hi) {
    r = ((f(x - 2.0 * h) - f(x + 2.0 * h)) + 8.0 * (f(x + h) - f(x - h))) / (12.0 * h);
  } else if (x + 4.0 * h <= hi) {
    r = (-25.0 * f(x) + 48.0 * f(x + h) - 36.0 * f(x + 2.0 * h) + 16.0 * f(x + 3.0 * h) -
         3.0 * f(x + 4.0 * h)) /
        (12.0 * h);
  } else {
    r = (25.0 * f(x) - 48.0 * f(x - h) + 36.0 * f(x - 2.0 * h) - 16.0 * f(x - 3.0 * h) +
         3.0 * f(x - 4.0 * h)) /
        (12.0 * h);
  }
  return r;
}

/// Derivative of tabulated values. Uniform grids with ≥ 5 points use
/// fourth-order stencils; otherwise three-point non-uniform formulas.
std::vector<double> grid_derivative(std::span<const double> s, std::span<const double> values);

bool is_uniform(std::span<const double> s);

}  // namespace helixlab::numdiff
