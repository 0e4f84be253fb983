#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "helixlab/expr.hpp"
#include "helixlab/manifold.hpp"
#include "helixlab/types.hpp"

namespace helixlab {

/// Where a curve's derivatives come from; selects default tolerances downstream.
enum class CurveSource { Analytic, Sampled };

/// Position and first two parameter derivatives at one parameter value.
struct CurveJet {
  Point3 position;
  Vector3 d1;
  Vector3 d2;
};

/// A regular parametrized curve t ↦ α(t) on [t_min, t_max].
class ParamCurve {
 public:
  using JetFn = std::function<CurveJet(double)>;

  ParamCurve(JetFn jet, double t_min, double t_max, CurveSource source);

  /// Components as expressions in `param` (t by default); derivatives via nested duals.
  static ParamCurve from_expressions(const Expr& x, const Expr& y, const Expr& z, double t_min,
                                     double t_max, Var param = Var::T);

  CurveJet jet(double t) const { return jet_(t); }
  Point3 eval(double t) const { return jet_(t).position; }
  Vector3 derivative(double t) const { return jet_(t).d1; }
  Vector3 second_derivative(double t) const { return jet_(t).d2; }

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  CurveSource source() const { return source_; }

  /// R·α + b
  ParamCurve transformed(const Matrix3& rotation, const Vector3& translation) const;

 private:
  JetFn jet_;
  double t_min_;
  double t_max_;
  CurveSource source_;
};

enum class Interpolation {
  Cubic,           ///< clamped cubic spline, end slopes from 5-point one-sided stencils
  QuinticHermite,  ///< uses stored first and second derivatives
};

struct SampledCurve {
  std::vector<double> t;
  std::vector<Point3> points;
  /// Optional stored derivatives (both or neither); enable QuinticHermite.
  std::vector<Vector3> d1;
  std::vector<Vector3> d2;
  /// Optional exact increments points[i+1] − points[i] (QuinticHermite only).
  std::vector<Vector3> increments;
  Interpolation interpolation = Interpolation::Cubic;
};

inline constexpr std::size_t kMinSamples = 7;

/// Throws TooFewSamples, NonMonotoneParameter or InvalidArgument.
ParamCurve curve_from_samples(const SampledCurve& samples);

/// Arc-length parametrization s ↦ α(t(s)) of a ParamCurve under a metric.
///
/// s(t) is tabulated on an adaptive knot grid by adaptive Simpson quadrature;
/// t(s) starts from a monotone Hermite guess on that grid and is polished by
/// Newton steps on s(t) − s. The tangent is α'(t)/‖α'(t)‖_g, so the unit-speed
/// property holds to rounding rather than to interpolation accuracy.
class UnitSpeedCurve {
 public:
  static UnitSpeedCurve reparametrize(ParamCurve curve, MetricField metric, double tol = 1e-10);

  double length() const { return knots_->s.back(); }
  double s_of(double t) const;
  double t_of(double s) const;

  Point3 position(double s) const;
  /// T = α'(s)
  Vector3 tangent(double s) const;
  /// g-speed ‖α'(t)‖_g of the underlying parametrization.
  double param_speed(double t) const;

  const ParamCurve& param() const { return curve_; }
  const MetricField& metric() const { return metric_; }
  CurveSource source() const { return curve_.source(); }

  /// Default finite-difference step in arc length for derivatives along the curve.
  double default_step() const;

  std::size_t knot_count() const { return knots_->t.size(); }

 private:
  struct Knots {
    std::vector<double> t;
    std::vector<double> s;
    std::vector<double> speed;
  };

  UnitSpeedCurve(ParamCurve curve, MetricField metric, double tol, std::shared_ptr<const Knots> knots);
  double integrate(double a, double b) const;

  ParamCurve curve_;
  MetricField metric_;
  double tol_;
  std::shared_ptr<const Knots> knots_;
};

/// Uniform arc-length grid of `count` points over [0, L], endpoints included.
std::vector<double> uniform_grid(const UnitSpeedCurve& curve, std::size_t count);

}  // namespace helixlab
