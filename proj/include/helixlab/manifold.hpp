#pragma once

#include <array>
#include <functional>
#include <string>

#include "helixlab/expr.hpp"
#include "helixlab/types.hpp"

namespace helixlab {

class UnitSpeedCurve;

/// Determinant / eigenvalue floor below which a metric is refused.
inline constexpr double kDefinitenessFloor = 1e-12;

/// Metric quantities at a single chart point, evaluated once and reused.
struct MetricAt {
  Point3 point;
  Matrix3 g;
  Matrix3 g_inv;
  double det;

  double inner(const Vector3& x, const Vector3& y) const { return x.dot(g * y); }
  double norm(const Vector3& x) const;
  /// (X × Y)^k = g^{kl} √det g ε_{lij} X^i Y^j, standard chart orientation.
  Vector3 cross(const Vector3& x, const Vector3& y) const;
  /// Raise an index: v^i = g^{ij} w_j.
  Vector3 raise(const Vector3& covector) const { return g_inv * covector; }
};

/// A Riemannian metric on one chart of M³: p ↦ g_ij(p) plus ∂_k g_ij.
/// Immutable and cheap to copy; evaluation is reentrant.
class MetricField {
 public:
  using EvalFn = std::function<SymMatrix3(const Point3&)>;
  using PartialsFn = std::function<std::array<SymMatrix3, 3>(const Point3&)>;

  static MetricField euclidean();
  static MetricField constant(const SymMatrix3& g);
  /// Upper half-space model g_ij = δ_ij / z² on z > 0.
  static MetricField half_space();
  /// Row-major g11..g33. Partials come from dual-number evaluation.
  static MetricField from_expressions(const std::array<Expr, 9>& entries);
  /// Partials default to central differences with h = 1e-5·max(1, |p|).
  static MetricField from_function(EvalFn eval, PartialsFn partials = {}, std::string name = "custom");

  /// Throws SingularMetric when not positive definite at p.
  SymMatrix3 eval(const Point3& p) const;
  std::array<SymMatrix3, 3> partials(const Point3& p) const;
  MetricAt at(const Point3& p) const;

  bool is_constant() const { return constant_; }
  const std::string& name() const { return name_; }

 private:
  MetricField(EvalFn eval, PartialsFn partials, bool constant, std::string name);

  EvalFn eval_;
  PartialsFn partials_;
  bool constant_ = false;
  std::string name_;
};

/// f: chart → ℝ with first and second partial derivatives.
class ScalarField {
 public:
  using ValueFn = std::function<double(const Point3&)>;
  using GradFn = std::function<Vector3(const Point3&)>;
  using HessFn = std::function<SymMatrix3(const Point3&)>;

  /// First partials exact (duals); second partials by central differences of
  /// the exact first partials with h = 1e-5·max(1, |p|).
  static ScalarField from_expression(const Expr& e);
  /// f(p) = <coeffs, p> + offset.
  static ScalarField linear(const Vector3& coeffs, double offset = 0.0);
  static ScalarField constant(double value);
  /// Hessian defaults to central differences of `grad`.
  static ScalarField from_functions(ValueFn value, GradFn grad, HessFn hess = {},
                                    std::string description = "custom");

  double eval(const Point3& p) const { return value_(p); }
  Vector3 partials(const Point3& p) const { return grad_(p); }
  SymMatrix3 second_partials(const Point3& p) const { return hess_(p); }

  /// c·f
  ScalarField scaled(double c) const;
  const std::string& description() const { return description_; }

 private:
  ScalarField(ValueFn v, GradFn g, HessFn h, std::string description);

  ValueFn value_;
  GradFn grad_;
  HessFn hess_;
  std::string description_;
};

using VectorFieldAlongCurve = std::function<Vector3(double s)>;

/// Γ^k_ij = ½ g^{kl} (∂_i g_jl + ∂_j g_il − ∂_l g_ij)
Christoffel3 christoffel(const MetricField& metric, const Point3& p);

double inner(const MetricField& metric, const Point3& p, const Vector3& x, const Vector3& y);
double norm(const MetricField& metric, const Point3& p, const Vector3& x);
Vector3 cross(const MetricField& metric, const Point3& p, const Vector3& x, const Vector3& y);

/// (∇f)^i = g^{ij} ∂_j f
Vector3 gradient(const ScalarField& field, const MetricField& metric, const Point3& p);

/// Hess_ij = ∂_i∂_j f − Γ^k_ij ∂_k f (covariant components).
SymMatrix3 hessian(const ScalarField& field, const MetricField& metric, const Point3& p);

/// g-norm of the Hessian viewed as a (1,1) tensor: sqrt(H_ij H_kl g^{ik} g^{jl}).
double hessian_norm(const SymMatrix3& hess, const MetricAt& m);

/// (∇_T V)^k = dV^k/ds + Γ^k_ij T^i V^j at α(s). dV/ds uses a five-point
/// stencil of step `h` (0 picks a default), one-sided near the curve ends.
Vector3 covariant_derivative_along(const UnitSpeedCurve& curve, const MetricField& metric,
                                   const VectorFieldAlongCurve& field, double s, double h = 0.0);

}  // namespace helixlab
