#include "helixlab/frenet.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "helixlab/error.hpp"
#include "helixlab/numdiff.hpp"
#include "helixlab/parallel.hpp"

namespace helixlab {

namespace {

struct FrameAtT {
  Point3 position;
  Vector3 velocity;
  double speed;
  Vector3 T;
  Vector3 N;
  double kappa;
  MetricAt metric;
  Christoffel3 gamma;
};

// All quantities in the curve's own parameter t; the arc-length derivative is
// d/ds = (1/σ) d/dt with σ = ‖α'(t)‖_g.
FrameAtT frame_at(const ParamCurve& curve, const MetricField& metric, double t, double kappa_min, double s) {
  const CurveJet j = curve.jet(t);
  MetricAt m = metric.at(j.position);
  Christoffel3 gamma = christoffel(metric, j.position);
  const double speed = m.norm(j.d1);
  if (!(speed > 0.0)) throw Error(ErrorCode::IrregularCurve, fmt::format("zero speed at s = {:.17g}", s));
  const Vector3 T = j.d1 / speed;
  // ∇_v v, then its component normal to T divided by σ² is ∇_T T.
  const Vector3 accel = j.d2 + gamma.contract(j.d1, j.d1);
  const Vector3 dT = (accel - m.inner(accel, T) * T) / (speed * speed);
  const double kappa = m.norm(dT);
  if (!(kappa >= kappa_min))
    throw Error(ErrorCode::DegenerateFrame,
                fmt::format("curvature {:.3g} below {:g} at s = {:.17g}", kappa, kappa_min, s));
  return {j.position, j.d1, speed, T, dT / kappa, kappa, m, gamma};
}

}  // namespace

FrenetSample frenet_apparatus(const UnitSpeedCurve& curve, const MetricField& metric, double s,
                              const FrenetOptions& options) {
  const double t = curve.t_of(s);
  const ParamCurve& pc = curve.param();
  const FrameAtT f = frame_at(pc, metric, t, options.kappa_min, s);

  FrenetSample out;
  out.s = s;
  out.position = f.position;
  out.T = f.T;
  out.N = f.N;
  out.B = f.metric.cross(f.T, f.N);
  out.kappa = f.kappa;

  // ∇_T N = (dN/dt + Γ(v, N)) / σ, with dN/dt from a five-point stencil in t.
  auto normal = [&](double u) -> Vector3 {
    if (u == t) return f.N;
    return frame_at(pc, metric, u, options.kappa_min, s).N;
  };
  auto torsion = [&](double hs) {
    const Vector3 dN = numdiff::derivative(normal, t, hs / f.speed, pc.t_min(), pc.t_max());
    const Vector3 covN = (dN + f.gamma.contract(f.velocity, f.N)) / f.speed;
    return f.metric.inner(covN, out.B);
  };
  double hs = options.step > 0.0 ? options.step : curve.default_step();
  out.tau = torsion(hs);
  // The frame turns at rate √(κ²+τ²); keep the default stencil well inside one turn.
  constexpr double kMaxTurnPerStep = 0.01;
  const double omega = std::hypot(out.kappa, out.tau);
  if (options.step <= 0.0 && omega * hs > kMaxTurnPerStep) {
    hs = kMaxTurnPerStep / omega;
    out.tau = torsion(hs);
  }

  out.W = darboux(out);
  out.W0 = unit_darboux(out);
  return out;
}

std::vector<FrenetSample> frenet_series(const UnitSpeedCurve& curve, const MetricField& metric,
                                        std::span<const double> grid, const FrenetOptions& options) {
  std::vector<FrenetSample> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { out[i] = frenet_apparatus(curve, metric, grid[i], options); });
  return out;
}

Vector3 darboux(const FrenetSample& sample) { return sample.tau * sample.T + sample.kappa * sample.B; }

Vector3 unit_darboux(const FrenetSample& sample) {
  const double r = std::hypot(sample.kappa, sample.tau);
  return (sample.tau / r) * sample.T + (sample.kappa / r) * sample.B;
}

CurvatureProfile measure_profile(std::span<const FrenetSample> samples) {
  CurvatureProfile p;
  p.provenance = ProfileProvenance::Measured;
  for (const auto& f : samples) {
    p.s.push_back(f.s);
    p.kappa.push_back(f.kappa);
    p.tau.push_back(f.tau);
  }
  return p;
}

void validate_profile(const CurvatureProfile& profile, double kappa_min) {
  const std::size_t n = profile.s.size();
  if (n < 2) throw Error(ErrorCode::EmptyGrid, "curvature profile needs at least 2 points");
  if (profile.kappa.size() != n || profile.tau.size() != n)
    throw Error(ErrorCode::InvalidArgument, "curvature profile columns differ in length");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(profile.s[i]) || !std::isfinite(profile.kappa[i]) || !std::isfinite(profile.tau[i]))
      throw Error(ErrorCode::NonFiniteValue, fmt::format("profile entry {} is not finite", i));
    if (i > 0 && !(profile.s[i] > profile.s[i - 1]))
      throw Error(ErrorCode::NonMonotoneParameter, fmt::format("profile s[{}] not increasing", i));
    if (profile.provenance == ProfileProvenance::Measured && !(profile.kappa[i] > kappa_min))
      throw Error(ErrorCode::DegenerateFrame,
                  fmt::format("curvature {:.3g} not above {:g} at s = {:.17g}", profile.kappa[i], kappa_min,
                              profile.s[i]));
  }
}

std::vector<double> slant_invariant_series(const CurvatureProfile& profile, double kappa_min) {
  validate_profile(profile, kappa_min);
  const std::size_t n = profile.size();
  std::vector<double> ratio(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(std::abs(profile.kappa[i]) > kappa_min))
      throw Error(ErrorCode::DegenerateFrame,
                  fmt::format("curvature {:.3g} not above {:g} at s = {:.17g}", profile.kappa[i], kappa_min,
                              profile.s[i]));
    ratio[i] = profile.tau[i] / profile.kappa[i];
  }
  const std::vector<double> dratio = numdiff::grid_derivative(profile.s, ratio);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k2 = profile.kappa[i] * profile.kappa[i];
    const double r2 = k2 + profile.tau[i] * profile.tau[i];
    out[i] = k2 / (r2 * std::sqrt(r2)) * dratio[i];
  }
  return out;
}

double slant_invariant(const CurvatureProfile& profile, double s, double kappa_min) {
  const std::vector<double> series = slant_invariant_series(profile, kappa_min);
  const auto& g = profile.s;
  if (s <= g.front()) return series.front();
  if (s >= g.back()) return series.back();
  const std::size_t i = std::upper_bound(g.begin(), g.end(), s) - g.begin() - 1;
  const double w = (s - g[i]) / (g[i + 1] - g[i]);
  return (1.0 - w) * series[i] + w * series[i + 1];
}

}  // namespace helixlab
