#include "helixlab/analysis.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "helixlab/error.hpp"
#include "helixlab/numdiff.hpp"
#include "helixlab/parallel.hpp"

namespace helixlab {

ConstancyResult check_constancy(std::span<const double> values, double tolerance) {
  if (values.size() < 2) throw Error(ErrorCode::EmptyGrid, "constancy check needs at least 2 values");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i])) throw Error(ErrorCode::NonFiniteValue, fmt::format("value {} is not finite", i));
  ConstancyResult r;
  r.tolerance = tolerance;
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  for (double v : values) r.max_abs_deviation = std::max(r.max_abs_deviation, std::abs(v - r.mean));
  r.scale = std::max(1.0, std::abs(r.mean));
  r.is_constant = r.max_abs_deviation <= tolerance * r.scale;
  return r;
}

Tolerances Tolerances::for_source(CurveSource source) {
  Tolerances t;
  if (source == CurveSource::Sampled) {
    t.constancy = 1e-3;
    t.affine = 1e-3;
    t.theorem = 1e-2;
  }
  return t;
}

std::vector<double> AlongCurve::column(double AlongSample::*member) const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.*member);
  return out;
}

AlongCurve measure_along(const ScalarField& field, const UnitSpeedCurve& curve, const MetricField& metric,
                         std::span<const double> grid) {
  if (grid.size() < 2) throw Error(ErrorCode::EmptyGrid, "analysis grid needs at least 2 points");
  AlongCurve out;
  out.grid.assign(grid.begin(), grid.end());
  out.metric_constant = metric.is_constant();
  const std::vector<FrenetSample> frames = frenet_series(curve, metric, grid);
  out.samples.resize(grid.size());

  const VectorFieldAlongCurve grad_along = [&](double u) {
    return gradient(field, metric, curve.position(u));
  };
  parallel_for(grid.size(), [&](std::size_t i) {
    AlongSample& a = out.samples[i];
    a.frame = frames[i];
    const MetricAt m = metric.at(a.frame.position);
    a.grad = m.raise(field.partials(a.frame.position));
    if (!a.grad.allFinite())
      throw Error(ErrorCode::NonFiniteValue, fmt::format("gradient not finite at s = {:.17g}", grid[i]));
    a.grad_norm = m.norm(a.grad);
    a.components = {m.inner(a.grad, a.frame.T), m.inner(a.grad, a.frame.N), m.inner(a.grad, a.frame.B)};
    a.cos_theta = a.components[1];
    a.darboux_n = m.inner(a.grad, a.frame.W0);
    a.darboux_w = m.inner(a.grad, a.frame.W);
    a.kappa2_tau2 = a.frame.kappa * a.frame.kappa + a.frame.tau * a.frame.tau;
    a.affine_residual = m.norm(covariant_derivative_along(curve, metric, grad_along, grid[i]));
    a.hessian_norm = hessian_norm(hessian(field, metric, a.frame.position), m);
  });
  out.profile = measure_profile(frames);
  out.slant_invariant = slant_invariant_series(out.profile);
  return out;
}

// ---------------------------------------------------------------------------

EikonalResult is_eikonal_along(const AlongCurve& data, const Tolerances& tol) {
  EikonalResult r;
  const auto norms = data.column(&AlongSample::grad_norm);
  r.norm = check_constancy(norms, tol.constancy);
  r.zero_gradient = *std::max_element(norms.begin(), norms.end()) <= tol.zero_floor;
  return r;
}

AffineResult is_affine_along(const AlongCurve& data, const Tolerances& tol) {
  AffineResult r;
  r.tolerance = tol.affine;
  for (const auto& s : data.samples) {
    r.max_residual = std::max(r.max_residual, s.affine_residual);
    r.max_hessian_norm = std::max(r.max_hessian_norm, s.hessian_norm);
  }
  r.affine = r.max_residual <= tol.affine;
  return r;
}

namespace {

HelixVerdict helix_verdict(const AlongCurve& data, const Tolerances& tol, double AlongSample::*member,
                           bool require_nonzero) {
  HelixVerdict v;
  v.value = check_constancy(data.column(member), tol.constancy);
  v.eikonal = is_eikonal_along(data, tol).verdict();
  v.nonzero = std::abs(v.value.mean) > tol.zero_floor;
  v.verdict = v.value.is_constant && v.eikonal && (v.nonzero || !require_nonzero);
  return v;
}

}  // namespace

HelixVerdict classify_slant_helix(const AlongCurve& data, const Tolerances& tol) {
  return helix_verdict(data, tol, &AlongSample::cos_theta, true);
}

HelixVerdict classify_darboux_helix(const AlongCurve& data, const Tolerances& tol) {
  return helix_verdict(data, tol, &AlongSample::darboux_n, false);
}

HelixVerdict classify_non_normed_darboux(const AlongCurve& data, const Tolerances& tol) {
  return helix_verdict(data, tol, &AlongSample::darboux_w, false);
}

PrecessionResult check_constant_precession(const CurvatureProfile& profile, double tolerance) {
  const std::size_t n = profile.size();
  if (n < 2) throw Error(ErrorCode::EmptyGrid, "precession check needs a non-empty profile");
  if (n < 32)
    throw Error(ErrorCode::InsufficientSamples, fmt::format("precession check needs >= 32 points, got {}", n));
  if (profile.kappa.size() != n || profile.tau.size() != n)
    throw Error(ErrorCode::InvalidArgument, "curvature profile columns differ in length");

  PrecessionResult r;
  std::vector<double> radius2(n), phase(n);
  for (std::size_t i = 0; i < n; ++i) {
    radius2[i] = profile.kappa[i] * profile.kappa[i] + profile.tau[i] * profile.tau[i];
    phase[i] = std::atan2(profile.kappa[i], profile.tau[i]);
    if (i > 0) {
      // unwrap
      while (phase[i] - phase[i - 1] > std::numbers::pi) phase[i] -= 2.0 * std::numbers::pi;
      while (phase[i] - phase[i - 1] < -std::numbers::pi) phase[i] += 2.0 * std::numbers::pi;
    }
  }
  r.radius2 = check_constancy(radius2, tolerance);
  r.w = std::sqrt(r.radius2.mean);

  const double s_mean = std::accumulate(profile.s.begin(), profile.s.end(), 0.0) / static_cast<double>(n);
  const double p_mean = std::accumulate(phase.begin(), phase.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (profile.s[i] - s_mean) * (profile.s[i] - s_mean);
    sxy += (profile.s[i] - s_mean) * (phase[i] - p_mean);
  }
  r.mu = sxy / sxx;
  r.phase_offset = p_mean - r.mu * s_mean;
  for (std::size_t i = 0; i < n; ++i)
    r.max_phase_residual =
        std::max(r.max_phase_residual, std::abs(phase[i] - (r.phase_offset + r.mu * profile.s[i])));
  const double phase_scale = std::max(1.0, std::abs(p_mean));
  r.phase_affine = r.max_phase_residual <= tolerance * phase_scale;
  r.general_helix = std::abs(r.mu) * (profile.s.back() - profile.s.front()) <= tolerance * phase_scale;
  r.verdict = r.radius2.is_constant && r.phase_affine;
  return r;
}

// ---------------------------------------------------------------------------

AxisField reconstruct_axis(const AlongCurve& data, const Tolerances& tol) {
  const HelixVerdict slant = classify_slant_helix(data, tol);
  if (!slant.verdict)
    throw Error(ErrorCode::NotSlantHelix, "axis reconstruction needs a slant-helix verdict");
  AxisField out;
  out.cos_theta = slant.value.mean;
  out.n = check_constancy(data.column(&AlongSample::darboux_n), tol.constancy).mean;
  out.points.reserve(data.samples.size());
  for (const auto& a : data.samples) {
    const auto& f = a.frame;
    const double rho = std::hypot(f.kappa, f.tau);
    AxisPoint p;
    p.s = f.s;
    p.a1 = out.n * f.tau / rho;
    p.a2 = out.cos_theta;
    p.a3 = out.n * f.kappa / rho;
    p.axis = p.a1 * f.T + p.a2 * f.N + p.a3 * f.B;
    out.points.push_back(p);
    out.mean_axis += p.axis;
    // {T, N, B} is g-orthonormal, so the g-norm is the Euclidean norm of frame components
    const Vector3 in_frame(a.components[0] - p.a1, a.components[1] - p.a2, a.components[2] - p.a3);
    out.max_deviation = std::max(out.max_deviation, in_frame.norm());
  }
  out.mean_axis /= static_cast<double>(out.points.size());
  if (data.metric_constant) {
    double dev = 0.0;
    for (const auto& p : out.points) dev = std::max(dev, (p.axis - out.mean_axis).norm());
    out.ambient_deviation = dev;
  }
  return out;
}

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::HypothesisNotMet: return "hypothesis_not_met";
    case CheckStatus::NotApplicable: return "not_applicable";
  }
  return "fail";
}

Theorem21Report verify_theorem_2_1(const AlongCurve& data, const Tolerances& tol) {
  Theorem21Report r;
  r.affine = is_affine_along(data, tol).affine;
  r.eikonal = is_eikonal_along(data, tol).verdict();
  const HelixVerdict slant = classify_slant_helix(data, tol);
  r.slant = slant.verdict;
  r.invariant = check_constancy(data.slant_invariant, tol.theorem);
  if (r.slant) {
    const AxisField axis = reconstruct_axis(data, tol);
    r.axis_deviation = axis.max_deviation;
    r.ambient_deviation = axis.ambient_deviation;
  }
  if (!r.affine || !r.slant) {
    r.status = CheckStatus::HypothesisNotMet;
    return r;
  }
  const bool axis_ok = *r.axis_deviation <= tol.theorem && r.ambient_deviation.value_or(0.0) <= tol.theorem;
  r.status = r.invariant.is_constant && axis_ok ? CheckStatus::Pass : CheckStatus::Fail;
  return r;
}

Corollary22Report verify_corollary_2_2(const CurvatureProfile& profile, double n, double mu, double tolerance) {
  validate_profile(profile);
  Corollary22Report r;
  r.n = n;
  r.mu = mu;
  r.tolerance = tolerance;
  const std::size_t count = profile.size();
  std::vector<double> tangent(count), binormal(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double rho = std::hypot(profile.kappa[i], profile.tau[i]);
    tangent[i] = n * profile.tau[i] / rho;
    binormal[i] = n * profile.kappa[i] / rho;
  }
  const auto dt = numdiff::grid_derivative(profile.s, tangent);
  const auto db = numdiff::grid_derivative(profile.s, binormal);
  for (std::size_t i = 0; i < count; ++i) {
    r.max_residual_tangent = std::max(r.max_residual_tangent, std::abs(dt[i] - mu * profile.kappa[i]));
    r.max_residual_binormal = std::max(r.max_residual_binormal, std::abs(db[i] + mu * profile.tau[i]));
  }
  r.pass = r.max_residual_tangent < tolerance && r.max_residual_binormal < tolerance;
  return r;
}

Theorem22Report verify_theorem_2_2(const AlongCurve& data, const Tolerances& tol) {
  Theorem22Report r;
  r.affine = is_affine_along(data, tol).affine;
  const HelixVerdict slant = classify_slant_helix(data, tol);
  const HelixVerdict darboux = classify_darboux_helix(data, tol);
  r.slant = slant.verdict;
  r.darboux = darboux.verdict;
  r.implication_holds = !r.slant || r.darboux;
  r.n = darboux.value.mean;
  r.cos_theta = slant.value.mean;
  for (const auto& a : data.samples) {
    // ∇f − (n W0 + cosθ N) in the g-orthonormal frame {T, N, B}
    const auto& f = a.frame;
    const double rho = std::hypot(f.kappa, f.tau);
    const Vector3 diff(a.components[0] - r.n * f.tau / rho, a.components[1] - r.cos_theta,
                       a.components[2] - r.n * f.kappa / rho);
    r.decomposition_residual = std::max(r.decomposition_residual, diff.norm());
  }
  if (!r.slant) {
    r.status = CheckStatus::NotApplicable;
  } else if (!r.affine) {
    r.status = CheckStatus::HypothesisNotMet;
  } else {
    r.status = r.darboux && r.decomposition_residual < tol.theorem ? CheckStatus::Pass : CheckStatus::Fail;
  }
  return r;
}

Theorem23Report verify_theorem_2_3(const AlongCurve& data, const Tolerances& tol) {
  Theorem23Report r;
  r.affine = is_affine_along(data, tol).affine;
  r.non_normed = classify_non_normed_darboux(data, tol).verdict;
  r.slant = classify_slant_helix(data, tol).verdict;
  r.kappa2_tau2 = check_constancy(data.column(&AlongSample::kappa2_tau2), tol.constancy);
  r.agree = r.slant == r.kappa2_tau2.is_constant;

  const auto& s = data.grid;
  std::vector<double> a2, a3;
  for (const auto& a : data.samples) {
    a2.push_back(a.components[1]);
    a3.push_back(a.components[2]);
  }
  const auto da2 = numdiff::grid_derivative(s, a2);
  const auto dr2 = numdiff::grid_derivative(s, data.column(&AlongSample::kappa2_tau2));
  const auto dtau = numdiff::grid_derivative(s, data.profile.tau);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(dtau[i]) <= kTauPrimeFloor) continue;
    ++r.a2_relation_points;
    r.a2_relation_residual = std::max(r.a2_relation_residual, std::abs(da2[i] - a3[i] * dr2[i] / (2.0 * dtau[i])));
  }

  if (!r.affine || !r.non_normed) {
    r.status = CheckStatus::HypothesisNotMet;
  } else {
    r.status = r.agree && r.a2_relation_residual < tol.theorem ? CheckStatus::Pass : CheckStatus::Fail;
  }
  return r;
}

CorollariesReport verify_corollaries_2_3_2_4(const AlongCurve& data, const Tolerances& tol) {
  CorollariesReport r;
  r.affine = is_affine_along(data, tol).affine;
  r.non_normed = classify_non_normed_darboux(data, tol).verdict;
  r.slant = classify_slant_helix(data, tol).verdict;
  r.darboux = classify_darboux_helix(data, tol).verdict;
  r.precession = check_constant_precession(data.profile, tol.constancy).verdict;
  r.kappa2_tau2_constant = check_constancy(data.column(&AlongSample::kappa2_tau2), tol.constancy).is_constant;
  r.cor_2_1 = (r.non_normed && r.kappa2_tau2_constant) == r.darboux;
  r.cor_2_3 = r.slant == r.precession;
  r.cor_2_4 = r.slant == r.darboux;
  if (!r.non_normed) {
    r.status = CheckStatus::NotApplicable;
  } else if (!r.affine) {
    r.status = CheckStatus::HypothesisNotMet;
  } else {
    r.status = r.cor_2_1 && r.cor_2_3 && r.cor_2_4 ? CheckStatus::Pass : CheckStatus::Fail;
  }
  return r;
}

// ---------------------------------------------------------------------------

ClassificationReport classify(const AlongCurve& data, const Tolerances& tol) {
  ClassificationReport r;
  r.tolerances = tol;
  r.eikonal = is_eikonal_along(data, tol);
  r.affine = is_affine_along(data, tol);
  r.slant = classify_slant_helix(data, tol);
  r.darboux = classify_darboux_helix(data, tol);
  r.non_normed = classify_non_normed_darboux(data, tol);
  r.precession = check_constant_precession(data.profile, tol.constancy);
  if (r.slant.verdict) r.axis = reconstruct_axis(data, tol);

  r.notes.emplace_back(
      "global hypotheses on M (complete, connected, without boundary, isometric to a product N x R) are "
      "assumed, not checked");
  r.notes.emplace_back(fmt::format("all verdicts hold on the analyzed window s in [0, {:.17g}] only",
                                   data.grid.back()));
  r.notes.emplace_back("eikonal condition checked along the curve, not on all of M");
  if (r.eikonal.zero_gradient) r.notes.emplace_back("gradient vanishes along the curve (constant field)");
  if (!r.affine.affine)
    r.notes.emplace_back("f is not affine along the curve: theorem hypotheses are not met");
  const bool tau_vanishes = std::any_of(data.profile.tau.begin(), data.profile.tau.end(),
                                        [&](double t) { return std::abs(t) <= kKappaMin; });
  if (r.slant.value.is_constant && !r.slant.nonzero && r.darboux.verdict)
    r.notes.emplace_back(
        "g(grad f, N) vanishes identically: grad f lies along W0 (a general helix about grad f); the slant "
        "definition excludes this case, so slant/Darboux and slant/kappa^2+tau^2 equivalences split here");
  if (tau_vanishes) r.notes.emplace_back("torsion vanishes on the grid; Darboux helix verdicts assume tau != 0");
  r.notes.emplace_back("constant-precession phase fitted as mu*s + phase_offset");
  return r;
}

// ---------------------------------------------------------------------------
// Convenience overloads that measure first.

namespace {

// Gradient-only measurement: eikonal and affine checks need no Frenet frame,
// so they stay defined on straight segments.
AlongCurve measure_gradient(const ScalarField& field, const UnitSpeedCurve& curve, const MetricField& metric,
                            std::span<const double> grid) {
  if (grid.size() < 2) throw Error(ErrorCode::EmptyGrid, "analysis grid needs at least 2 points");
  AlongCurve out;
  out.grid.assign(grid.begin(), grid.end());
  out.metric_constant = metric.is_constant();
  out.samples.resize(grid.size());
  const VectorFieldAlongCurve grad_along = [&](double u) { return gradient(field, metric, curve.position(u)); };
  parallel_for(grid.size(), [&](std::size_t i) {
    AlongSample& a = out.samples[i];
    a.frame.s = grid[i];
    a.frame.position = curve.position(grid[i]);
    const MetricAt m = metric.at(a.frame.position);
    a.grad = m.raise(field.partials(a.frame.position));
    if (!a.grad.allFinite())
      throw Error(ErrorCode::NonFiniteValue, fmt::format("gradient not finite at s = {:.17g}", grid[i]));
    a.grad_norm = m.norm(a.grad);
    a.affine_residual = m.norm(covariant_derivative_along(curve, metric, grad_along, grid[i]));
    a.hessian_norm = hessian_norm(hessian(field, metric, a.frame.position), m);
  });
  return out;
}

}  // namespace

EikonalResult is_eikonal_along(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                               std::span<const double> grid, const Tolerances& tol) {
  return is_eikonal_along(measure_gradient(f, c, g, grid), tol);
}
AffineResult is_affine_along(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                             std::span<const double> grid, const Tolerances& tol) {
  return is_affine_along(measure_gradient(f, c, g, grid), tol);
}
HelixVerdict classify_slant_helix(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                                  std::span<const double> grid, const Tolerances& tol) {
  return classify_slant_helix(measure_along(f, c, g, grid), tol);
}
HelixVerdict classify_darboux_helix(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                                    std::span<const double> grid, const Tolerances& tol) {
  return classify_darboux_helix(measure_along(f, c, g, grid), tol);
}
HelixVerdict classify_non_normed_darboux(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                                         std::span<const double> grid, const Tolerances& tol) {
  return classify_non_normed_darboux(measure_along(f, c, g, grid), tol);
}
AxisField reconstruct_axis(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                           std::span<const double> grid, const Tolerances& tol) {
  return reconstruct_axis(measure_along(f, c, g, grid), tol);
}
Theorem21Report verify_theorem_2_1(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                                   std::span<const double> grid, const Tolerances& tol) {
  return verify_theorem_2_1(measure_along(f, c, g, grid), tol);
}
Theorem22Report verify_theorem_2_2(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                                   std::span<const double> grid, const Tolerances& tol) {
  return verify_theorem_2_2(measure_along(f, c, g, grid), tol);
}
Theorem23Report verify_theorem_2_3(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                                   std::span<const double> grid, const Tolerances& tol) {
  return verify_theorem_2_3(measure_along(f, c, g, grid), tol);
}
CorollariesReport verify_corollaries_2_3_2_4(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                                             std::span<const double> grid, const Tolerances& tol) {
  return verify_corollaries_2_3_2_4(measure_along(f, c, g, grid), tol);
}

}  // namespace helixlab
