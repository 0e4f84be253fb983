#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <string>

#include <fmt/format.h>

#include "helixlab/analysis.hpp"
#include "helixlab/error.hpp"
#include "helixlab/generate.hpp"

namespace testing_support {

using namespace helixlab;

// Runs f and returns the code of the helixlab::Error it throws; fails the test otherwise.
inline std::optional<ErrorCode> thrown_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

#define EXPECT_HELIX_ERROR(stmt, expected)                                          \
  do {                                                                              \
    const auto code_ = ::testing_support::thrown_code([&] { (void)(stmt); });       \
    ASSERT_TRUE(code_.has_value()) << "no helixlab::Error from " #stmt;             \
    EXPECT_EQ(*code_, expected) << to_string(*code_);                               \
  } while (0)

inline Matrix3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline Vector3 random_vector(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

// Central-difference derivative of a vector function; oracle-side, independent of numdiff.
inline Vector3 central(const std::function<Vector3(double)>& f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

// Classical Euclidean curvature and torsion of a curve with known first three derivatives.
struct KappaTau {
  double kappa, tau;
};
inline KappaTau euclidean_kappa_tau(const Vector3& d1, const Vector3& d2, const Vector3& d3) {
  const Vector3 c = d1.cross(d2);
  return {c.norm() / std::pow(d1.norm(), 3), c.dot(d3) / c.squaredNorm()};
}

// A random space curve with nowhere-vanishing curvature on [0, 1]: a helix-like
// base plus small polynomial perturbations, written as expressions in t.
struct RandomCurve {
  std::string x, y, z;
  double t_max;
};
inline RandomCurve random_curve(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> r(1.0, 2.0), b(0.3, 1.0), p(-0.05, 0.05);
  const double a = r(rng), c = b(rng);
  return {fmt::format("{:.17g}*cos(t) + {:.17g}*t^2", a, p(rng)),
          fmt::format("{:.17g}*sin(t) + {:.17g}*t^3", a, p(rng)),
          fmt::format("{:.17g}*t + {:.17g}*t^2", c, p(rng)), 2.0 + r(rng)};
}

inline UnitSpeedCurve make_curve(const RandomCurve& rc, const MetricField& metric) {
  return UnitSpeedCurve::reparametrize(
      ParamCurve::from_expressions(parse(rc.x), parse(rc.y), parse(rc.z), 0.0, rc.t_max), metric);
}

}  // namespace testing_support
