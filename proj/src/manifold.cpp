#include "helixlab/manifold.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <cmath>

#include "helixlab/curves.hpp"
#include "helixlab/error.hpp"
#include "helixlab/numdiff.hpp"

namespace helixlab {

SymMatrix3::SymMatrix3(const Matrix3& m) {
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) set(i, j, m(i, j));
}

SymMatrix3 SymMatrix3::diagonal(double a, double b, double c) {
  SymMatrix3 m;
  m.set(0, 0, a);
  m.set(1, 1, b);
  m.set(2, 2, c);
  return m;
}

bool all_finite(const Vector3& v) { return v.allFinite(); }

double MetricAt::norm(const Vector3& x) const { return std::sqrt(std::max(0.0, inner(x, x))); }

Vector3 MetricAt::cross(const Vector3& x, const Vector3& y) const {
  return g_inv * (std::sqrt(det) * x.cross(y));
}

namespace {

std::string describe(const Point3& p) { return fmt::format("({:.6g}, {:.6g}, {:.6g})", p.x(), p.y(), p.z()); }

double step_for(const Point3& p) { return 1e-5 * std::max(1.0, p.norm()); }

std::array<SymMatrix3, 3> central_partials(const MetricField::EvalFn& eval, const Point3& p) {
  std::array<SymMatrix3, 3> out;
  const double h = step_for(p);
  for (int k = 0; k < 3; ++k) {
    Point3 hi = p, lo = p;
    hi[k] += h;
    lo[k] -= h;
    out[k] = SymMatrix3((eval(hi).matrix() - eval(lo).matrix()) / (2.0 * h));
  }
  return out;
}

void check_definite(const SymMatrix3& g, const Point3& p) {
  const Matrix3& m = g.matrix();
  if (!m.allFinite()) throw Error(ErrorCode::NonFiniteValue, "metric not finite at " + describe(p));
  const double m1 = m(0, 0);
  const double m2 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double m3 = m.determinant();
  if (m1 <= kDefinitenessFloor || m2 <= kDefinitenessFloor || m3 <= kDefinitenessFloor)
    throw Error(ErrorCode::SingularMetric,
                fmt::format("metric not positive definite at {} (minors {:.3g}, {:.3g}, {:.3g})",
                            describe(p), m1, m2, m3));
}

}  // namespace

MetricField::MetricField(EvalFn eval, PartialsFn partials, bool constant, std::string name)
    : eval_(std::move(eval)), partials_(std::move(partials)), constant_(constant), name_(std::move(name)) {}

MetricField MetricField::euclidean() { return constant(SymMatrix3::identity()); }

MetricField MetricField::constant(const SymMatrix3& g) {
  check_definite(g, Point3::Zero());
  const bool identity = g.matrix() == Matrix3::Identity();
  return MetricField([g](const Point3&) { return g; },
                     [](const Point3&) { return std::array<SymMatrix3, 3>{}; }, true,
                     identity ? "euclidean" : "constant");
}

MetricField MetricField::half_space() {
  auto eval = [](const Point3& p) {
    if (!(p.z() > 0.0)) throw Error(ErrorCode::DomainError, "half-space metric needs z > 0 at " + describe(p));
    const double c = 1.0 / (p.z() * p.z());
    return SymMatrix3::diagonal(c, c, c);
  };
  auto partials = [](const Point3& p) {
    if (!(p.z() > 0.0)) throw Error(ErrorCode::DomainError, "half-space metric needs z > 0 at " + describe(p));
    const double c = -2.0 / (p.z() * p.z() * p.z());
    return std::array<SymMatrix3, 3>{SymMatrix3{}, SymMatrix3{}, SymMatrix3::diagonal(c, c, c)};
  };
  return MetricField(eval, partials, false, "half_space");
}

MetricField MetricField::from_expressions(const std::array<Expr, 9>& e) {
  bool constant = true;
  for (const auto& entry : e) constant = constant && entry.is_constant();
  auto eval = [e](const Point3& p) {
    SymMatrix3 g;
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        const double upper = e[3 * i + j].eval(p.x(), p.y(), p.z());
        const double lower = e[3 * j + i].eval(p.x(), p.y(), p.z());
        if (std::abs(upper - lower) > 1e-12 * (1.0 + std::abs(upper)))
          throw Error(ErrorCode::NonSymmetricMetric,
                      fmt::format("g{}{} != g{}{} at {}", i + 1, j + 1, j + 1, i + 1, describe(p)));
        g.set(i, j, upper);
      }
    }
    return g;
  };
  auto partials = [e](const Point3& p) {
    std::array<SymMatrix3, 3> out;
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        const auto d = eval_dual(e[3 * i + j], p);
        for (int k = 0; k < 3; ++k) out[k].set(i, j, d.d[k]);
      }
    }
    return out;
  };
  std::string name = "expression";
  if (constant) {
    MetricField m(eval, partials, true, name);
    m.eval(Point3::Zero());
    return m;
  }
  return MetricField(eval, partials, false, name);
}

MetricField MetricField::from_function(EvalFn eval, PartialsFn partials, std::string name) {
  if (!partials) partials = [eval](const Point3& p) { return central_partials(eval, p); };
  return MetricField(std::move(eval), std::move(partials), false, std::move(name));
}

SymMatrix3 MetricField::eval(const Point3& p) const {
  if (!p.allFinite()) throw Error(ErrorCode::NonFiniteValue, "non-finite chart point");
  SymMatrix3 g = eval_(p);
  check_definite(g, p);
  return g;
}

std::array<SymMatrix3, 3> MetricField::partials(const Point3& p) const {
  if (constant_) return {};
  return partials_(p);
}

MetricAt MetricField::at(const Point3& p) const {
  const SymMatrix3 g = eval(p);
  MetricAt m{p, g.matrix(), g.matrix().inverse(), g.matrix().determinant()};
  return m;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(ValueFn v, GradFn g, HessFn h, std::string description)
    : value_(std::move(v)), grad_(std::move(g)), hess_(std::move(h)), description_(std::move(description)) {}

namespace {

SymMatrix3 hessian_from_gradient(const ScalarField::GradFn& grad, const Point3& p) {
  const double h = step_for(p);
  Matrix3 j;
  for (int k = 0; k < 3; ++k) {
    Point3 hi = p, lo = p;
    hi[k] += h;
    lo[k] -= h;
    j.col(k) = (grad(hi) - grad(lo)) / (2.0 * h);
  }
  return SymMatrix3(0.5 * (j + j.transpose()));
}

}  // namespace

ScalarField ScalarField::from_expression(const Expr& e) {
  auto value = [e](const Point3& p) { return e.eval(p.x(), p.y(), p.z()); };
  auto grad = [e](const Point3& p) {
    const auto d = eval_dual(e, p);
    return Vector3(d.d[0], d.d[1], d.d[2]);
  };
  auto hess = [grad](const Point3& p) { return hessian_from_gradient(grad, p); };
  return ScalarField(value, grad, hess, e.to_string());
}

ScalarField ScalarField::linear(const Vector3& coeffs, double offset) {
  return ScalarField([coeffs, offset](const Point3& p) { return coeffs.dot(p) + offset; },
                     [coeffs](const Point3&) { return coeffs; },
                     [](const Point3&) { return SymMatrix3{}; },
                     fmt::format("linear({:.17g}, {:.17g}, {:.17g})", coeffs.x(), coeffs.y(), coeffs.z()));
}

ScalarField ScalarField::constant(double value) {
  return ScalarField([value](const Point3&) { return value; },
                     [](const Point3&) { return Vector3::Zero().eval(); },
                     [](const Point3&) { return SymMatrix3{}; }, fmt::format("{:.17g}", value));
}

ScalarField ScalarField::from_functions(ValueFn value, GradFn grad, HessFn hess, std::string description) {
  if (!hess) hess = [grad](const Point3& p) { return hessian_from_gradient(grad, p); };
  return ScalarField(std::move(value), std::move(grad), std::move(hess), std::move(description));
}

ScalarField ScalarField::scaled(double c) const {
  auto v = value_;
  auto g = grad_;
  auto h = hess_;
  return ScalarField([v, c](const Point3& p) { return c * v(p); },
                     [g, c](const Point3& p) { return (c * g(p)).eval(); },
                     [h, c](const Point3& p) { return SymMatrix3(c * h(p).matrix()); },
                     fmt::format("{:.17g}*({})", c, description_));
}

// ---------------------------------------------------------------------------

namespace {

Christoffel3 christoffel_at(const MetricField& metric, const MetricAt& m) {
  Christoffel3 gamma;
  if (metric.is_constant()) return gamma;
  const auto dg = metric.partials(m.point);
  // Γ_lij (first kind) = ½ (∂_i g_jl + ∂_j g_il − ∂_l g_ij)
  std::array<Matrix3, 3> first;
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        first[l](i, j) = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
  for (int k = 0; k < 3; ++k) {
    Matrix3 sum = Matrix3::Zero();
    for (int l = 0; l < 3; ++l) sum += m.g_inv(k, l) * first[l];
    gamma.symbols[k] = SymMatrix3(sum);
  }
  return gamma;
}

}  // namespace

Christoffel3 christoffel(const MetricField& metric, const Point3& p) {
  return christoffel_at(metric, metric.at(p));
}

double inner(const MetricField& metric, const Point3& p, const Vector3& x, const Vector3& y) {
  return metric.at(p).inner(x, y);
}

double norm(const MetricField& metric, const Point3& p, const Vector3& x) { return metric.at(p).norm(x); }

Vector3 cross(const MetricField& metric, const Point3& p, const Vector3& x, const Vector3& y) {
  return metric.at(p).cross(x, y);
}

Vector3 gradient(const ScalarField& field, const MetricField& metric, const Point3& p) {
  const Vector3 df = field.partials(p);
  if (!df.allFinite()) throw Error(ErrorCode::NonFiniteValue, "field differential not finite at " + describe(p));
  return metric.at(p).raise(df);
}

SymMatrix3 hessian(const ScalarField& field, const MetricField& metric, const Point3& p) {
  const MetricAt m = metric.at(p);
  const Christoffel3 gamma = christoffel_at(metric, m);
  const Vector3 df = field.partials(p);
  Matrix3 h = field.second_partials(p).matrix();
  for (int k = 0; k < 3; ++k) h -= df[k] * gamma.symbols[k].matrix();
  return SymMatrix3(h);
}

double hessian_norm(const SymMatrix3& hess, const MetricAt& m) {
  const Matrix3 mixed = m.g_inv * hess.matrix();
  return std::sqrt(std::max(0.0, (mixed * mixed).trace()));
}

Vector3 covariant_derivative_along(const UnitSpeedCurve& curve, const MetricField& metric,
                                   const VectorFieldAlongCurve& field, double s, double h) {
  if (h <= 0.0) h = curve.default_step();
  const Vector3 dv = numdiff::derivative([&](double u) -> Vector3 { return field(u); }, s, h, 0.0, curve.length());
  const Point3 p = curve.position(s);
  const Vector3 t = curve.tangent(s);
  const Vector3 v = field(s);
  return dv + christoffel(metric, p).contract(t, v);
}

}  // namespace helixlab
