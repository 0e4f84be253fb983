#include "helixlab/numdiff.hpp"

#include "helixlab/error.hpp"

namespace helixlab::numdiff {

bool is_uniform(std::span<const double> s) {
  if (s.size() < 3) return true;
  const double mean = (s.back() - s.front()) / static_cast<double>(s.size() - 1);
  for (std::size_t i = 1; i < s.size(); ++i)
    if (std::abs((s[i] - s[i - 1]) - mean) > 1e-9 * std::abs(mean)) return false;
  return true;
}

std::vector<double> grid_derivative(std::span<const double> s, std::span<const double> v) {
  const std::size_t n = s.size();
  if (n < 2 || v.size() != n) throw Error(ErrorCode::EmptyGrid, "derivative needs >= 2 matching samples");
  std::vector<double> d(n);
  if (n >= 5 && is_uniform(s)) {
    const double h = (s.back() - s.front()) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= 2 && i + 2 < n) {
        d[i] = (v[i - 2] - v[i + 2] + 8.0 * (v[i + 1] - v[i - 1])) / (12.0 * h);
      } else if (i < 2) {
        d[i] = (-25.0 * v[i] + 48.0 * v[i + 1] - 36.0 * v[i + 2] + 16.0 * v[i + 3] - 3.0 * v[i + 4]) /
               (12.0 * h);
      } else {
        d[i] = (25.0 * v[i] - 48.0 * v[i - 1] + 36.0 * v[i - 2] - 16.0 * v[i - 3] + 3.0 * v[i - 4]) /
               (12.0 * h);
      }
    }
    return d;
  }
  if (n == 2) {
    d[0] = d[1] = (v[1] - v[0]) / (s[1] - s[0]);
    return d;
  }
  // Derivative of the quadratic through three neighbouring samples.
  auto quad = [&](std::size_t a, double at) {
    const double x0 = s[a], x1 = s[a + 1], x2 = s[a + 2];
    return v[a] * (2 * at - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
           v[a + 1] * (2 * at - x0 - x2) / ((x1 - x0) * (x1 - x2)) +
           v[a + 2] * (2 * at - x0 - x1) / ((x2 - x0) * (x2 - x1));
  };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : (i + 1 >= n ? n - 3 : i - 1);
    d[i] = quad(a, s[i]);
  }
  return d;
}

}  // namespace helixlab::numdiff
