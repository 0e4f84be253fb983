#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "helixlab/curves.hpp"
#include "helixlab/expr.hpp"
#include "helixlab/frenet.hpp"
#include "helixlab/manifold.hpp"

namespace helixlab {

/// Prescribed curvature and torsion on [s_begin, s_end], integrated with step `step`.
///
/// κ may change sign: the Frenet system stays well posed and a sign flip of κ
/// corresponds to flipping N and B. Measured curvature of the output is |κ|.
struct ProfileSpec {
  std::function<double(double)> kappa;
  std::function<double(double)> tau;
  double s_begin = 0.0;
  double s_end = 1.0;
  double step = 1.0 / 8192.0;
  std::string description;
};

inline constexpr double kMaxProfileSteps = 1e7;

ProfileSpec profile_from_expressions(const Expr& kappa, const Expr& tau, double s_begin, double s_end,
                                     double step);

/// κ(s) = w·sin(μ·s), τ(s) = w·cos(μ·s). Throws NonPositiveW.
ProfileSpec constant_precession_profile(double w, double mu, double s_begin, double s_end, double step);

/// Tabulates a profile on a uniform grid of `count` points (prescribed provenance).
CurvatureProfile tabulate(const ProfileSpec& spec, std::size_t count);

struct FrameState {
  Point3 position = Point3::Zero();
  Vector3 T = Vector3::UnitX();
  Vector3 N = Vector3::UnitY();
  Vector3 B = Vector3::UnitZ();
};

/// Output of Frenet integration: stored frames plus the interpolated curve
/// (quintic Hermite through positions, T and κN; parameter = arc length).
struct FrenetIntegration {
  std::vector<double> s;
  std::vector<FrameState> frames;
  std::vector<double> kappa;
  std::vector<double> tau;
  double max_drift = 0.0;            ///< largest pre-orthonormalization frame defect
  double max_orthonormal_error = 0.0;  ///< largest defect after re-orthonormalization
  std::optional<UnitSpeedCurve> curve;
};

/// Classical RK4 on α' = T, T' = κN, N' = −κT + τB, B' = −τN in the Euclidean
/// chart, re-orthonormalizing the frame by modified Gram–Schmidt after every step.
/// Throws NonOrthonormalInitialFrame, StepTooLarge, InvalidArgument.
FrenetIntegration integrate_frenet(const ProfileSpec& profile, const FrameState& initial = {});

/// A vector field along a curve sampled on a grid, with exact slopes from the
/// transport ODE; evaluation is cubic Hermite between grid points.
class TransportedField {
 public:
  TransportedField(std::vector<double> s, std::vector<Vector3> values, std::vector<Vector3> slopes);

  Vector3 operator()(double s) const;
  const std::vector<double>& grid() const { return s_; }
  const std::vector<Vector3>& values() const { return values_; }

  /// Frenet components (a1, a2, a3) = (g(V,T), g(V,N), g(V,B)) per grid point.
  std::vector<Vector3> components;

 private:
  std::vector<double> s_;
  std::vector<Vector3> values_;
  std::vector<Vector3> slopes_;
};

/// Solves ∇_T V = 0, i.e. dV^k/ds = −Γ^k_ij T^i V^j, by RK4 with `substeps`
/// steps per grid interval. When `frenet_components` is set, reports (a1, a2, a3)
/// and throws DegenerateFrame where κ ≤ κ_min.
TransportedField parallel_transport(const UnitSpeedCurve& curve, const MetricField& metric, const Vector3& v0,
                                    std::span<const double> grid, bool frenet_components = true,
                                    int substeps = 8);

/// A curve/field/metric triple ready for classification.
struct Fixture {
  std::string name;
  UnitSpeedCurve curve;
  ScalarField field;
  MetricField metric;
};

/// f = x + y² + z², α(s) = (s/√2, cos(s/√2), sin(s/√2)), Euclidean, s ∈ [0, 4π√2].
Fixture example_2_1();

struct PrecessionOptions {
  /// Window in the phase μ·s, kept inside (0, π) so κ stays positive.
  double phase_begin = 0.5235987755982988;  // π/6
  double phase_end = 2.6179938779914944;    // 5π/6
  std::size_t steps = 8192;
};

struct PrecessionFixture {
  Fixture fixture;
  double w;
  double mu;
  double n;          ///< w/√(w²+μ²)
  double cos_theta;  ///< −μ/√(w²+μ²)
  Vector3 axis;      ///< unit fitted axis D; the field is f(p) = <D, p>
  double fit_residual;
  FrenetIntegration integration;
};

/// Integrates a constant-precession curve and fits its fixed slant axis by a
/// least-squares constant-vector fit to n·W0(s) + cosθ·N(s). Throws NonPositiveW,
/// InvalidArgument (μ = 0) and AxisFitFailed (residual > 1e-3).
PrecessionFixture precession_fixture(double w, double mu, const PrecessionOptions& options = {});

}  // namespace helixlab
