#include "helixlab/curves.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <span>

#include "helixlab/error.hpp"

namespace helixlab {

ParamCurve::ParamCurve(JetFn jet, double t_min, double t_max, CurveSource source)
    : jet_(std::move(jet)), t_min_(t_min), t_max_(t_max), source_(source) {
  if (!(std::isfinite(t_min) && std::isfinite(t_max) && t_min < t_max))
    throw Error(ErrorCode::InvalidArgument, fmt::format("curve domain [{}, {}] is empty", t_min, t_max));
}

ParamCurve ParamCurve::from_expressions(const Expr& x, const Expr& y, const Expr& z, double t_min,
                                        double t_max, Var param) {
  auto jet = [x, y, z, param](double t) {
    const Jet2 jx = eval_jet2(x, param, t);
    const Jet2 jy = eval_jet2(y, param, t);
    const Jet2 jz = eval_jet2(z, param, t);
    return CurveJet{{jx.value, jy.value, jz.value}, {jx.d1, jy.d1, jz.d1}, {jx.d2, jy.d2, jz.d2}};
  };
  return ParamCurve(jet, t_min, t_max, CurveSource::Analytic);
}

ParamCurve ParamCurve::transformed(const Matrix3& rotation, const Vector3& translation) const {
  auto inner = jet_;
  return ParamCurve(
      [inner, rotation, translation](double t) {
        const CurveJet j = inner(t);
        return CurveJet{rotation * j.position + translation, rotation * j.d1, rotation * j.d2};
      },
      t_min_, t_max_, source_);
}

// ---------------------------------------------------------------------------
// Sampled curves

namespace {

/// Derivative at nodes[at] of the polynomial interpolating (nodes, values).
template <class V>
V lagrange_derivative_at_node(std::span<const double> nodes, std::span<const V> values, std::size_t at) {
  const std::size_t n = nodes.size();
  const double x = nodes[at];
  V acc = V::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    double w;
    if (k == at) {
      w = 0.0;
      for (std::size_t m = 0; m < n; ++m)
        if (m != k) w += 1.0 / (x - nodes[m]);
    } else {
      double num = 1.0, den = 1.0;
      for (std::size_t m = 0; m < n; ++m) {
        if (m != k && m != at) num *= (x - nodes[m]);
        if (m != k) den *= (nodes[k] - nodes[m]);
      }
      w = num / den;
    }
    acc += w * values[k];
  }
  return acc;
}

struct CubicSpline {
  std::vector<double> t;
  std::vector<Point3> y;
  std::vector<Vector3> m;  // second derivatives at knots

  CurveJet eval(double x) const {
    const std::size_t n = t.size();
    std::size_t i = std::upper_bound(t.begin(), t.end(), x) - t.begin();
    i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
    const double h = t[i + 1] - t[i];
    const double a = t[i + 1] - x;
    const double b = x - t[i];
    const Vector3 ci = y[i] / h - m[i] * h / 6.0;
    const Vector3 cj = y[i + 1] / h - m[i + 1] * h / 6.0;
    CurveJet j;
    j.position = m[i] * (a * a * a) / (6.0 * h) + m[i + 1] * (b * b * b) / (6.0 * h) + ci * a + cj * b;
    j.d1 = -m[i] * (a * a) / (2.0 * h) + m[i + 1] * (b * b) / (2.0 * h) - ci + cj;
    j.d2 = m[i] * a / h + m[i + 1] * b / h;
    return j;
  }
};

CubicSpline build_clamped_spline(const std::vector<double>& t, const std::vector<Point3>& y) {
  const std::size_t n = t.size();
  const std::span<const double> head(t.data(), 5);
  const std::span<const double> tail(t.data() + n - 5, 5);
  const Vector3 slope0 = lagrange_derivative_at_node<Vector3>(head, std::span<const Point3>(y.data(), 5), 0);
  const Vector3 slope1 = lagrange_derivative_at_node<Vector3>(tail, std::span<const Point3>(y.data() + n - 5, 5), 4);

  // Tridiagonal system for the knot second derivatives (Thomas algorithm).
  std::vector<double> sub(n), diag(n), sup(n);
  std::vector<Vector3> rhs(n);
  auto hh = [&](std::size_t i) { return t[i + 1] - t[i]; };
  diag[0] = 2.0 * hh(0);
  sup[0] = hh(0);
  rhs[0] = 6.0 * ((y[1] - y[0]) / hh(0) - slope0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    sub[i] = hh(i - 1);
    diag[i] = 2.0 * (hh(i - 1) + hh(i));
    sup[i] = hh(i);
    rhs[i] = 6.0 * ((y[i + 1] - y[i]) / hh(i) - (y[i] - y[i - 1]) / hh(i - 1));
  }
  sub[n - 1] = hh(n - 2);
  diag[n - 1] = 2.0 * hh(n - 2);
  rhs[n - 1] = 6.0 * (slope1 - (y[n - 1] - y[n - 2]) / hh(n - 2));

  for (std::size_t i = 1; i < n; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<Vector3> m(n);
  m[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
  return CubicSpline{t, y, std::move(m)};
}

struct QuinticHermite {
  std::vector<double> t;
  std::vector<Point3> p;
  std::vector<Vector3> v;
  std::vector<Vector3> a;
  std::vector<Vector3> dp;  // p[i+1] - p[i]

  CurveJet eval(double x) const {
    const std::size_t n = t.size();
    std::size_t i = std::upper_bound(t.begin(), t.end(), x) - t.begin();
    i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
    const double h = t[i + 1] - t[i];
    const double u = (x - t[i]) / h;
    const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;

    const std::array<double, 6> b{1 - 10 * u3 + 15 * u4 - 6 * u5,
                                  u - 6 * u3 + 8 * u4 - 3 * u5,
                                  0.5 * u2 - 1.5 * u3 + 1.5 * u4 - 0.5 * u5,
                                  0.5 * u3 - u4 + 0.5 * u5,
                                  -4 * u3 + 7 * u4 - 3 * u5,
                                  10 * u3 - 15 * u4 + 6 * u5};
    const std::array<double, 6> db{-30 * u2 + 60 * u3 - 30 * u4,
                                   1 - 18 * u2 + 32 * u3 - 15 * u4,
                                   u - 4.5 * u2 + 6 * u3 - 2.5 * u4,
                                   1.5 * u2 - 4 * u3 + 2.5 * u4,
                                   -12 * u2 + 28 * u3 - 15 * u4,
                                   30 * u2 - 60 * u3 + 30 * u4};
    const std::array<double, 6> ddb{-60 * u + 180 * u2 - 120 * u3,
                                    -36 * u + 96 * u2 - 60 * u3,
                                    1 - 9 * u + 18 * u2 - 10 * u3,
                                    3 * u - 12 * u2 + 10 * u3,
                                    -24 * u + 84 * u2 - 60 * u3,
                                    60 * u - 180 * u2 + 120 * u3};
    // b[0] + b[5] = 1, so the end points enter only through the increment;
    // this keeps d2 free of the eps·|p|/h² cancellation on fine grids.
    const std::array<Vector3, 6> c{Vector3::Zero(), v[i] * h, a[i] * (h * h), a[i + 1] * (h * h), v[i + 1] * h,
                                   dp[i]};
    CurveJet j{p[i], Vector3::Zero(), Vector3::Zero()};
    for (std::size_t k = 1; k < 6; ++k) {
      j.position += b[k] * c[k];
      j.d1 += db[k] * c[k];
      j.d2 += ddb[k] * c[k];
    }
    j.d1 /= h;
    j.d2 /= h * h;
    return j;
  }
};

}  // namespace

ParamCurve curve_from_samples(const SampledCurve& samples) {
  const std::size_t n = samples.t.size();
  if (n < kMinSamples || samples.points.size() < kMinSamples)
    throw Error(ErrorCode::TooFewSamples, fmt::format("need at least {} samples, got {}", kMinSamples, n));
  if (samples.points.size() != n)
    throw Error(ErrorCode::InvalidArgument, "sample parameter and point counts differ");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(samples.t[i]) || !samples.points[i].allFinite())
      throw Error(ErrorCode::NonFiniteValue, fmt::format("sample {} is not finite", i));
    if (i > 0 && !(samples.t[i] > samples.t[i - 1]))
      throw Error(ErrorCode::NonMonotoneParameter,
                  fmt::format("t[{}] = {} does not exceed t[{}] = {}", i, samples.t[i], i - 1, samples.t[i - 1]));
  }

  if (samples.interpolation == Interpolation::QuinticHermite) {
    if (samples.d1.size() != n || samples.d2.size() != n)
      throw Error(ErrorCode::InvalidArgument, "quintic Hermite interpolation needs stored d1 and d2");
    std::vector<Vector3> dp = samples.increments;
    if (dp.empty()) {
      dp.resize(n - 1);
      for (std::size_t i = 0; i + 1 < n; ++i) dp[i] = samples.points[i + 1] - samples.points[i];
    } else if (dp.size() != n - 1) {
      throw Error(ErrorCode::InvalidArgument, "increments must have one entry per interval");
    }
    auto q = std::make_shared<const QuinticHermite>(
        QuinticHermite{samples.t, samples.points, samples.d1, samples.d2, std::move(dp)});
    return ParamCurve([q](double t) { return q->eval(t); }, samples.t.front(), samples.t.back(),
                      CurveSource::Sampled);
  }
  auto spline = std::make_shared<const CubicSpline>(build_clamped_spline(samples.t, samples.points));
  return ParamCurve([spline](double t) { return spline->eval(t); }, samples.t.front(), samples.t.back(),
                    CurveSource::Sampled);
}

// ---------------------------------------------------------------------------
// Arc length

namespace {

constexpr double kMinSpeed = 1e-10;
constexpr int kInitialIntervals = 64;
constexpr int kMaxRefineDepth = 18;

template <class F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb, double whole, double eps,
                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

/// Adaptive Simpson with one forced level of subdivision before the error test.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double eps) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double left_mid = 0.5 * (a + m), right_mid = 0.5 * (m + b);
  const double flm = f(left_mid), frm = f(right_mid);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, 50) + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, 50);
}

/// Cubic Hermite for t(s) on one knot interval, slopes dt/ds = 1/speed.
struct HermiteInverse {
  double s0, s1, t0, t1, m0, m1;

  double value(double s) const {
    const double h = s1 - s0;
    const double u = (s - s0) / h;
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * t0 + (u3 - 2 * u2 + u) * h * m0 + (-2 * u3 + 3 * u2) * t1 + (u3 - u2) * h * m1;
  }
  double slope(double s) const {
    const double h = s1 - s0;
    const double u = (s - s0) / h;
    const double u2 = u * u;
    return ((6 * u2 - 6 * u) * t0 + (-6 * u2 + 6 * u) * t1) / h + (3 * u2 - 4 * u + 1) * m0 + (3 * u2 - 2 * u) * m1;
  }
};

}  // namespace

UnitSpeedCurve::UnitSpeedCurve(ParamCurve curve, MetricField metric, double tol, std::shared_ptr<const Knots> knots)
    : curve_(std::move(curve)), metric_(std::move(metric)), tol_(tol), knots_(std::move(knots)) {}

double UnitSpeedCurve::param_speed(double t) const {
  const CurveJet j = curve_.jet(t);
  return std::sqrt(std::max(0.0, j.d1.dot(metric_.eval(j.position).matrix() * j.d1)));
}

double UnitSpeedCurve::integrate(double a, double b) const {
  if (a == b) return 0.0;
  const double span = curve_.t_max() - curve_.t_min();
  const double eps = tol_ * std::abs(b - a) / span;
  auto speed = [this](double t) {
    const double v = param_speed(t);
    if (!(v >= kMinSpeed))
      throw Error(ErrorCode::IrregularCurve, fmt::format("speed {:.3g} below {:g} at t = {:.17g}", v, kMinSpeed, t));
    return v;
  };
  return a < b ? adaptive_simpson(speed, a, b, eps) : -adaptive_simpson(speed, b, a, eps);
}

UnitSpeedCurve UnitSpeedCurve::reparametrize(ParamCurve curve, MetricField metric, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "arc-length tolerance must be positive");
  UnitSpeedCurve proto(curve, metric, tol, nullptr);

  const double a = curve.t_min(), b = curve.t_max();
  auto knots = std::make_shared<Knots>();
  const double knot_tol = std::max(std::sqrt(tol), 1e-9);

  auto speed_at = [&](double t) {
    const double v = proto.param_speed(t);
    if (!(v >= kMinSpeed))
      throw Error(ErrorCode::IrregularCurve, fmt::format("speed {:.3g} below {:g} at t = {:.17g}", v, kMinSpeed, t));
    return v;
  };

  // Refine [t0, t1] until the Hermite inverse reproduces the speed at the midpoint.
  std::function<void(double, double, double, double, double, int)> add_interval =
      [&](double t0, double t1, double s0, double v0, double v1, int depth) {
        const double ds = proto.integrate(t0, t1);
        const double tm = 0.5 * (t0 + t1);
        const double vm = speed_at(tm);
        const double sm = s0 + proto.integrate(t0, tm);
        const HermiteInverse h{s0, s0 + ds, t0, t1, 1.0 / v0, 1.0 / v1};
        const double dev = std::abs(vm * h.slope(sm) - 1.0);
        if (dev > knot_tol && depth < kMaxRefineDepth) {
          add_interval(t0, tm, s0, v0, vm, depth + 1);
          add_interval(tm, t1, sm, vm, v1, depth + 1);
          return;
        }
        knots->t.push_back(t1);
        knots->s.push_back(s0 + ds);
        knots->speed.push_back(v1);
      };

  knots->t.push_back(a);
  knots->s.push_back(0.0);
  knots->speed.push_back(speed_at(a));
  const double h = (b - a) / kInitialIntervals;
  for (int i = 0; i < kInitialIntervals; ++i) {
    const double t0 = a + i * h;
    const double t1 = i + 1 == kInitialIntervals ? b : a + (i + 1) * h;
    add_interval(t0, t1, knots->s.back(), knots->speed.back(), speed_at(t1), 0);
  }
  return UnitSpeedCurve(std::move(curve), std::move(metric), tol, std::move(knots));
}

double UnitSpeedCurve::s_of(double t) const {
  const auto& k = *knots_;
  t = std::clamp(t, k.t.front(), k.t.back());
  std::size_t i = std::upper_bound(k.t.begin(), k.t.end(), t) - k.t.begin();
  i = std::clamp<std::size_t>(i, 1, k.t.size() - 1) - 1;
  return k.s[i] + integrate(k.t[i], t);
}

double UnitSpeedCurve::t_of(double s) const {
  const auto& k = *knots_;
  s = std::clamp(s, 0.0, k.s.back());
  std::size_t i = std::upper_bound(k.s.begin(), k.s.end(), s) - k.s.begin();
  i = std::clamp<std::size_t>(i, 1, k.s.size() - 1) - 1;
  if (s == k.s[i]) return k.t[i];
  const HermiteInverse h{k.s[i], k.s[i + 1], k.t[i], k.t[i + 1], 1.0 / k.speed[i], 1.0 / k.speed[i + 1]};
  double t = std::clamp(h.value(s), k.t[i], k.t[i + 1]);
  const double scale = std::max(1.0, k.s.back());
  for (int iter = 0; iter < 8; ++iter) {
    const double r = k.s[i] + integrate(k.t[i], t) - s;
    if (std::abs(r) <= 1e-15 * scale) break;
    t = std::clamp(t - r / param_speed(t), k.t[i], k.t[i + 1]);
  }
  return t;
}

Point3 UnitSpeedCurve::position(double s) const { return curve_.eval(t_of(s)); }

Vector3 UnitSpeedCurve::tangent(double s) const {
  const CurveJet j = curve_.jet(t_of(s));
  return j.d1 / metric_.at(j.position).norm(j.d1);
}

double UnitSpeedCurve::default_step() const { return std::min(1e-3, length() / 16.0); }

std::vector<double> uniform_grid(const UnitSpeedCurve& curve, std::size_t count) {
  if (count < 2) throw Error(ErrorCode::EmptyGrid, "grid needs at least 2 points");
  std::vector<double> g(count);
  const double len = curve.length();
  for (std::size_t i = 0; i < count; ++i) g[i] = len * static_cast<double>(i) / static_cast<double>(count - 1);
  g.back() = len;
  return g;
}

}  // namespace helixlab
