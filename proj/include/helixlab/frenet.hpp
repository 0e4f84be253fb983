#pragma once

#include <span>
#include <vector>

#include "helixlab/curves.hpp"
#include "helixlab/manifold.hpp"

namespace helixlab {

/// Curvature below which the Frenet frame is considered undefined.
inline constexpr double kKappaMin = 1e-8;

/// Frenet apparatus at one arc-length value. T, N, B are g-orthonormal with
/// B = T × N; W = τT + κB is the Darboux vector and W0 its g-normalization.
struct FrenetSample {
  double s = 0.0;
  Point3 position;
  Vector3 T, N, B;
  double kappa = 0.0;
  double tau = 0.0;
  Vector3 W, W0;
};

enum class ProfileProvenance { Measured, Prescribed };

/// (s, κ, τ) on a strictly increasing grid.
struct CurvatureProfile {
  std::vector<double> s;
  std::vector<double> kappa;
  std::vector<double> tau;
  ProfileProvenance provenance = ProfileProvenance::Measured;

  std::size_t size() const { return s.size(); }
};

struct FrenetOptions {
  double kappa_min = kKappaMin;
  /// Arc-length step of the stencil differentiating N; 0 picks curve.default_step().
  double step = 0.0;
};

/// Throws DegenerateFrame (with the s location) when κ < kappa_min.
FrenetSample frenet_apparatus(const UnitSpeedCurve& curve, const MetricField& metric, double s,
                              const FrenetOptions& options = {});

/// Evaluates the apparatus on every grid point; parallel over the grid, results in grid order.
std::vector<FrenetSample> frenet_series(const UnitSpeedCurve& curve, const MetricField& metric,
                                        std::span<const double> grid, const FrenetOptions& options = {});

/// W = τT + κB
Vector3 darboux(const FrenetSample& sample);

/// W0 = (τT + κB)/√(κ²+τ²)
Vector3 unit_darboux(const FrenetSample& sample);

CurvatureProfile measure_profile(std::span<const FrenetSample> samples);

/// Validates grid monotonicity and κ > kappa_min (measured profiles only).
void validate_profile(const CurvatureProfile& profile, double kappa_min = kKappaMin);

/// κ²/(κ²+τ²)^{3/2} · (τ/κ)' on every profile grid point; (τ/κ)' by grid stencils.
std::vector<double> slant_invariant_series(const CurvatureProfile& profile, double kappa_min = kKappaMin);

/// Slant invariant at s, linearly interpolated between grid points.
double slant_invariant(const CurvatureProfile& profile, double s, double kappa_min = kKappaMin);

}  // namespace helixlab
