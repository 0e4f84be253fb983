#include "helixlab/generate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "helixlab/error.hpp"
#include "helixlab/parallel.hpp"

namespace helixlab {

ProfileSpec profile_from_expressions(const Expr& kappa, const Expr& tau, double s_begin, double s_end,
                                     double step) {
  ProfileSpec p;
  p.kappa = [kappa](double s) { return kappa.eval_at(Var::S, s); };
  p.tau = [tau](double s) { return tau.eval_at(Var::S, s); };
  p.s_begin = s_begin;
  p.s_end = s_end;
  p.step = step;
  p.description = fmt::format("kappa(s) = {}, tau(s) = {}", kappa.to_string(), tau.to_string());
  return p;
}

ProfileSpec constant_precession_profile(double w, double mu, double s_begin, double s_end, double step) {
  if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorCode::NonPositiveW, fmt::format("w = {} must be > 0", w));
  if (!std::isfinite(mu)) throw Error(ErrorCode::InvalidArgument, "mu must be finite");
  ProfileSpec p;
  p.kappa = [w, mu](double s) { return w * std::sin(mu * s); };
  p.tau = [w, mu](double s) { return w * std::cos(mu * s); };
  p.s_begin = s_begin;
  p.s_end = s_end;
  p.step = step;
  p.description = fmt::format("constant precession w = {:.17g}, mu = {:.17g}", w, mu);
  return p;
}

CurvatureProfile tabulate(const ProfileSpec& spec, std::size_t count) {
  if (count < 2) throw Error(ErrorCode::EmptyGrid, "tabulation needs at least 2 points");
  CurvatureProfile out;
  out.provenance = ProfileProvenance::Prescribed;
  for (std::size_t i = 0; i < count; ++i) {
    const double s = i + 1 == count ? spec.s_end
                                    : spec.s_begin + (spec.s_end - spec.s_begin) * static_cast<double>(i) /
                                                         static_cast<double>(count - 1);
    out.s.push_back(s);
    out.kappa.push_back(spec.kappa(s));
    out.tau.push_back(spec.tau(s));
  }
  return out;
}

namespace {

struct State {
  Point3 p;
  Vector3 T, N, B;

  State operator+(const State& o) const { return {p + o.p, T + o.T, N + o.N, B + o.B}; }
  State operator*(double h) const { return {p * h, T * h, N * h, B * h}; }
};

State frenet_rhs(const State& x, double kappa, double tau) {
  return {x.T, kappa * x.N, -kappa * x.T + tau * x.B, -tau * x.N};
}

double orthonormal_defect(const Vector3& T, const Vector3& N, const Vector3& B) {
  return std::max({std::abs(T.dot(T) - 1.0), std::abs(N.dot(N) - 1.0), std::abs(B.dot(B) - 1.0),
                   std::abs(T.dot(N)), std::abs(T.dot(B)), std::abs(N.dot(B))});
}

void gram_schmidt(State& x) {
  x.T.normalize();
  x.N -= x.N.dot(x.T) * x.T;
  x.N.normalize();
  x.B -= x.B.dot(x.T) * x.T;
  x.B -= x.B.dot(x.N) * x.N;
  x.B.normalize();
}

}  // namespace

FrenetIntegration integrate_frenet(const ProfileSpec& profile, const FrameState& initial) {
  const double span = profile.s_end - profile.s_begin;
  if (!(span > 0.0) || !std::isfinite(span))
    throw Error(ErrorCode::InvalidArgument, "profile domain must have s_end > s_begin");
  if (!(profile.step > 0.0)) throw Error(ErrorCode::InvalidArgument, "integration step must be positive");
  const double raw_steps = std::ceil(span / profile.step - 1e-9);
  if (raw_steps > kMaxProfileSteps)
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("{} steps exceed the run-size guard of {:g}", raw_steps, kMaxProfileSteps));
  const auto steps = std::max<std::size_t>(static_cast<std::size_t>(raw_steps), 1);
  const double h = span / static_cast<double>(steps);

  const double defect0 = orthonormal_defect(initial.T, initial.N, initial.B);
  if (defect0 > 1e-9 || initial.T.cross(initial.N).dot(initial.B) < 0.0)
    throw Error(ErrorCode::NonOrthonormalInitialFrame,
                fmt::format("initial frame defect {:.3g} (or left-handed)", defect0));

  FrenetIntegration out;
  out.s.reserve(steps + 1);
  out.frames.reserve(steps + 1);
  State x{initial.position, initial.T, initial.N, initial.B};
  auto record = [&](double s) {
    out.s.push_back(s);
    out.frames.push_back({x.p, x.T, x.N, x.B});
    out.kappa.push_back(profile.kappa(s));
    out.tau.push_back(profile.tau(s));
  };
  record(profile.s_begin);
  std::vector<Vector3> increments;
  increments.reserve(steps);

  for (std::size_t i = 0; i < steps; ++i) {
    const double s = profile.s_begin + h * static_cast<double>(i);
    const double s_next = i + 1 == steps ? profile.s_end : profile.s_begin + h * static_cast<double>(i + 1);
    const double sm = s + 0.5 * h;
    const double k0 = out.kappa.back(), t0 = out.tau.back();
    const double km = profile.kappa(sm), tm = profile.tau(sm);
    const double k1 = profile.kappa(s_next), t1 = profile.tau(s_next);

    const State a = frenet_rhs(x, k0, t0);
    const State b = frenet_rhs(x + a * (0.5 * h), km, tm);
    const State c = frenet_rhs(x + b * (0.5 * h), km, tm);
    const State d = frenet_rhs(x + c * h, k1, t1);
    const State dx = (a + b * 2.0 + c * 2.0 + d) * (h / 6.0);
    increments.push_back(dx.p);
    x = x + dx;
    if (!x.p.allFinite() || !x.T.allFinite())
      throw Error(ErrorCode::NonFiniteValue, fmt::format("integration diverged at s = {:.17g}", s_next));

    const double drift = orthonormal_defect(x.T, x.N, x.B);
    if (drift > 1e-6)
      throw Error(ErrorCode::StepTooLarge,
                  fmt::format("frame drift {:.3g} after step at s = {:.17g} (h = {:.3g})", drift, s_next, h));
    out.max_drift = std::max(out.max_drift, drift);
    gram_schmidt(x);
    out.max_orthonormal_error = std::max(out.max_orthonormal_error, orthonormal_defect(x.T, x.N, x.B));
    record(s_next);
  }

  SampledCurve samples;
  samples.interpolation = Interpolation::QuinticHermite;
  samples.t = out.s;
  samples.increments = std::move(increments);
  for (std::size_t i = 0; i < out.s.size(); ++i) {
    samples.points.push_back(out.frames[i].position);
    samples.d1.push_back(out.frames[i].T);
    samples.d2.push_back(out.kappa[i] * out.frames[i].N);
  }
  if (samples.t.size() >= kMinSamples)
    out.curve = UnitSpeedCurve::reparametrize(curve_from_samples(samples), MetricField::euclidean());
  return out;
}

// ---------------------------------------------------------------------------

TransportedField::TransportedField(std::vector<double> s, std::vector<Vector3> values, std::vector<Vector3> slopes)
    : s_(std::move(s)), values_(std::move(values)), slopes_(std::move(slopes)) {
  if (s_.size() < 2 || values_.size() != s_.size() || slopes_.size() != s_.size())
    throw Error(ErrorCode::InvalidArgument, "transported field needs matching grids of >= 2 points");
}

Vector3 TransportedField::operator()(double s) const {
  const std::size_t n = s_.size();
  std::size_t i = std::upper_bound(s_.begin(), s_.end(), s) - s_.begin();
  i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
  const double h = s_[i + 1] - s_[i];
  const double u = (s - s_[i]) / h;
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * values_[i] + (u3 - 2 * u2 + u) * h * slopes_[i] +
         (-2 * u3 + 3 * u2) * values_[i + 1] + (u3 - u2) * h * slopes_[i + 1];
}

TransportedField parallel_transport(const UnitSpeedCurve& curve, const MetricField& metric, const Vector3& v0,
                                    std::span<const double> grid, bool frenet_components, int substeps) {
  if (grid.size() < 2) throw Error(ErrorCode::EmptyGrid, "transport grid needs at least 2 points");
  if (substeps < 1) throw Error(ErrorCode::InvalidArgument, "substeps must be >= 1");
  auto rhs = [&](double s, const Vector3& v) -> Vector3 {
    const Point3 p = curve.position(s);
    return -christoffel(metric, p).contract(curve.tangent(s), v);
  };

  std::vector<double> s(grid.begin(), grid.end());
  std::vector<Vector3> values{v0};
  std::vector<Vector3> slopes{rhs(s[0], v0)};
  Vector3 v = v0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double h = (s[i + 1] - s[i]) / substeps;
    for (int k = 0; k < substeps; ++k) {
      const double a = s[i] + h * k;
      const Vector3 k1 = rhs(a, v);
      const Vector3 k2 = rhs(a + 0.5 * h, v + 0.5 * h * k1);
      const Vector3 k3 = rhs(a + 0.5 * h, v + 0.5 * h * k2);
      const Vector3 k4 = rhs(a + h, v + h * k3);
      v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    values.push_back(v);
    slopes.push_back(rhs(s[i + 1], v));
  }

  TransportedField field(s, values, slopes);
  if (frenet_components) {
    field.components.resize(s.size());
    parallel_for(s.size(), [&](std::size_t i) {
      const FrenetSample f = frenet_apparatus(curve, metric, s[i]);
      const MetricAt m = metric.at(f.position);
      field.components[i] = {m.inner(values[i], f.T), m.inner(values[i], f.N), m.inner(values[i], f.B)};
    });
  }
  return field;
}

// ---------------------------------------------------------------------------

Fixture example_2_1() {
  const double end = 4.0 * std::numbers::pi * std::numbers::sqrt2;
  auto curve = ParamCurve::from_expressions(parse("t/sqrt(2)"), parse("cos(t/sqrt(2))"), parse("sin(t/sqrt(2))"),
                                            0.0, end);
  MetricField metric = MetricField::euclidean();
  return Fixture{"example_2_1", UnitSpeedCurve::reparametrize(curve, metric),
                 ScalarField::from_expression(parse("x + y^2 + z^2")), metric};
}

PrecessionFixture precession_fixture(double w, double mu, const PrecessionOptions& options) {
  if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorCode::NonPositiveW, fmt::format("w = {} must be > 0", w));
  if (mu == 0.0 || !std::isfinite(mu))
    throw Error(ErrorCode::InvalidArgument, "precession fixture needs a finite non-zero mu");
  if (!(0.0 < options.phase_begin && options.phase_begin < options.phase_end &&
        options.phase_end < std::numbers::pi))
    throw Error(ErrorCode::InvalidArgument, "phase window must lie inside (0, pi)");
  if (options.steps < kMinSamples) throw Error(ErrorCode::InvalidArgument, "too few integration steps");

  const double a = options.phase_begin / mu, b = options.phase_end / mu;
  const double s0 = std::min(a, b), s1 = std::max(a, b);
  const ProfileSpec spec = constant_precession_profile(w, mu, s0, s1, (s1 - s0) / static_cast<double>(options.steps));
  FrenetIntegration integ = integrate_frenet(spec);

  const double r = std::hypot(w, mu);
  const double n = w / r;
  const double cos_theta = -mu / r;

  std::vector<Vector3> axis_samples;
  axis_samples.reserve(integ.s.size());
  Vector3 mean = Vector3::Zero();
  for (std::size_t i = 0; i < integ.s.size(); ++i) {
    const auto& f = integ.frames[i];
    const double k = integ.kappa[i], t = integ.tau[i];
    const double rho = std::hypot(k, t);
    const Vector3 w0 = (t / rho) * f.T + (k / rho) * f.B;
    axis_samples.push_back(n * w0 + cos_theta * f.N);
    mean += axis_samples.back();
  }
  mean /= static_cast<double>(axis_samples.size());
  double residual = 0.0;
  for (const auto& sample : axis_samples) residual = std::max(residual, (sample - mean).norm());
  if (residual > 1e-3)
    throw Error(ErrorCode::AxisFitFailed, fmt::format("constant-axis fit residual {:.3g} exceeds 1e-3", residual));
  const Vector3 axis = mean.normalized();

  MetricField metric = MetricField::euclidean();
  Fixture fixture{fmt::format("precession(w={:.17g}, mu={:.17g})", w, mu), *integ.curve, ScalarField::linear(axis),
                  metric};
  return PrecessionFixture{std::move(fixture), w, mu, n, cos_theta, axis, residual, std::move(integ)};
}

}  // namespace helixlab
