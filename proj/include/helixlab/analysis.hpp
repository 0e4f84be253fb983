#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "helixlab/curves.hpp"
#include "helixlab/frenet.hpp"
#include "helixlab/manifold.hpp"

namespace helixlab {

/// Verdict on whether a sampled quantity is constant:
/// is_constant ⇔ max_abs_deviation ≤ tolerance · scale, scale = max(1, |mean|).
struct ConstancyResult {
  bool is_constant = false;
  double mean = 0.0;
  double max_abs_deviation = 0.0;
  double scale = 1.0;
  double tolerance = 0.0;
};

/// Throws EmptyGrid (< 2 values) or NonFiniteValue.
ConstancyResult check_constancy(std::span<const double> values, double tolerance);

struct Tolerances {
  double constancy = 1e-6;   ///< relative, for every "= constant" clause
  double affine = 1e-6;      ///< absolute bound on max ‖∇_T ∇f‖_g
  double theorem = 1e-4;     ///< residual bound for theorem verifiers
  double zero_floor = 1e-10; ///< |g(∇f, N)| at or below this counts as zero

  /// Analytic inputs keep the defaults; sampled inputs use looser bounds.
  static Tolerances for_source(CurveSource source);
};

/// Everything measured at one grid point of a curve/field pair.
struct AlongSample {
  FrenetSample frame;
  Vector3 grad;            ///< ∇f at α(s), chart components
  double grad_norm = 0.0;  ///< ‖∇f‖_g
  double cos_theta = 0.0;  ///< g(∇f, N)
  double darboux_n = 0.0;  ///< g(∇f, W0)
  double darboux_w = 0.0;  ///< g(∇f, W)
  Vector3 components;      ///< (g(∇f,T), g(∇f,N), g(∇f,B))
  double kappa2_tau2 = 0.0;
  double affine_residual = 0.0;  ///< ‖∇_T ∇f‖_g
  double hessian_norm = 0.0;     ///< ‖Hess f‖_g at α(s)
};

/// Shared measurement of a curve/field pair over an arc-length grid; every
/// classifier and verifier below is a pure function of it.
struct AlongCurve {
  std::vector<double> grid;
  std::vector<AlongSample> samples;
  CurvatureProfile profile;
  std::vector<double> slant_invariant;
  bool metric_constant = false;

  std::vector<double> column(double AlongSample::*member) const;
};

AlongCurve measure_along(const ScalarField& field, const UnitSpeedCurve& curve, const MetricField& metric,
                         std::span<const double> grid);

// ---------------------------------------------------------------------------
// Classifiers

struct EikonalResult {
  ConstancyResult norm;        ///< of ‖∇f‖_g along the curve
  bool zero_gradient = false;  ///< ∇f ≡ 0 on the grid (degenerate constant case)
  bool verdict() const { return norm.is_constant; }
};

struct AffineResult {
  double max_residual = 0.0;       ///< max ‖∇_T ∇f‖_g
  double max_hessian_norm = 0.0;   ///< max ‖Hess f‖_g at curve points
  double tolerance = 0.0;
  bool affine = false;
};

/// Constancy of one inner product along the curve plus the eikonal prerequisite.
struct HelixVerdict {
  ConstancyResult value;
  bool eikonal = false;
  bool nonzero = false;  ///< |mean| above the zero floor
  bool verdict = false;
};

struct PrecessionResult {
  ConstancyResult radius2;      ///< κ² + τ² (= w²)
  double w = 0.0;
  double mu = 0.0;              ///< least-squares slope of the unwrapped phase atan2(κ, τ)
  double phase_offset = 0.0;    ///< phase at s = 0
  double max_phase_residual = 0.0;
  bool phase_affine = false;
  bool general_helix = false;   ///< μ within tolerance of 0: constant κ and τ
  bool verdict = false;
};

EikonalResult is_eikonal_along(const AlongCurve& data, const Tolerances& tol);
AffineResult is_affine_along(const AlongCurve& data, const Tolerances& tol);
/// Slant helix: g(∇f, N) a non-zero constant and f eikonal along α.
HelixVerdict classify_slant_helix(const AlongCurve& data, const Tolerances& tol);
/// g(∇f, W0) constant and f eikonal along α.
HelixVerdict classify_darboux_helix(const AlongCurve& data, const Tolerances& tol);
/// g(∇f, W) constant and f eikonal along α.
HelixVerdict classify_non_normed_darboux(const AlongCurve& data, const Tolerances& tol);
/// Needs ≥ 32 profile points (InsufficientSamples); EmptyGrid below 2.
PrecessionResult check_constant_precession(const CurvatureProfile& profile, double tolerance);

EikonalResult is_eikonal_along(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                               std::span<const double> grid, const Tolerances& tol = {});
AffineResult is_affine_along(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                             std::span<const double> grid, const Tolerances& tol = {});
HelixVerdict classify_slant_helix(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                                  std::span<const double> grid, const Tolerances& tol = {});
HelixVerdict classify_darboux_helix(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                                    std::span<const double> grid, const Tolerances& tol = {});
HelixVerdict classify_non_normed_darboux(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                                         std::span<const double> grid, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Axis reconstruction

struct AxisPoint {
  double s = 0.0;
  double a1 = 0.0, a2 = 0.0, a3 = 0.0;  ///< Frenet components of the candidate axis
  Vector3 axis;                          ///< a1 T + a2 N + a3 B
};

struct AxisField {
  std::vector<AxisPoint> points;
  double n = 0.0;          ///< measured g(∇f, W0), signed
  double cos_theta = 0.0;  ///< measured g(∇f, N)
  double max_deviation = 0.0;  ///< max ‖A(s) − ∇f(α(s))‖_g
  /// max ‖A(s) − mean A‖ when the metric is constant (chart-constant ⇔ parallel).
  std::optional<double> ambient_deviation;
  Vector3 mean_axis = Vector3::Zero();
};

/// A(s) = (nτ/√(τ²+κ²)) T + cosθ N + (nκ/√(τ²+κ²)) B. Throws NotSlantHelix.
AxisField reconstruct_axis(const AlongCurve& data, const Tolerances& tol);
AxisField reconstruct_axis(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                           std::span<const double> grid, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Theorem verifiers. They never throw on failed hypotheses; the status says so.

enum class CheckStatus { Pass, Fail, HypothesisNotMet, NotApplicable };
std::string_view to_string(CheckStatus status);

struct Theorem21Report {
  bool affine = false;
  bool eikonal = false;
  bool slant = false;
  ConstancyResult invariant;  ///< slant invariant κ²/(κ²+τ²)^{3/2}(τ/κ)'
  std::optional<double> axis_deviation;
  std::optional<double> ambient_deviation;
  CheckStatus status = CheckStatus::Fail;
};

struct Corollary22Report {
  double n = 0.0;
  double mu = 0.0;
  double max_residual_tangent = 0.0;   ///< (nτ/√(τ²+κ²))' − μκ
  double max_residual_binormal = 0.0;  ///< (nκ/√(τ²+κ²))' + μτ
  double tolerance = 0.0;
  bool pass = false;
};

struct Theorem22Report {
  bool affine = false;
  bool slant = false;
  bool darboux = false;
  bool implication_holds = false;  ///< slant ⇒ darboux
  double n = 0.0;
  double cos_theta = 0.0;
  double decomposition_residual = 0.0;  ///< max ‖∇f − (n W0 + cosθ N)‖_g
  CheckStatus status = CheckStatus::NotApplicable;
};

struct Theorem23Report {
  bool affine = false;
  bool non_normed = false;
  bool slant = false;
  ConstancyResult kappa2_tau2;
  bool agree = false;  ///< slant ⇔ κ²+τ² constant
  double a2_relation_residual = 0.0;  ///< max |a2' − a3 (κ²+τ²)'/(2τ')| where |τ'| > 1e-8
  std::size_t a2_relation_points = 0;
  CheckStatus status = CheckStatus::Fail;
};

struct CorollariesReport {
  bool affine = false;
  bool non_normed = false;
  bool slant = false;
  bool darboux = false;
  bool precession = false;
  bool kappa2_tau2_constant = false;
  bool cor_2_1 = false;  ///< (non-normed ∧ κ²+τ² constant) ⇔ darboux
  bool cor_2_3 = false;  ///< slant ⇔ constant precession
  bool cor_2_4 = false;  ///< slant ⇔ darboux
  CheckStatus status = CheckStatus::NotApplicable;
};

inline constexpr double kTauPrimeFloor = 1e-8;

Theorem21Report verify_theorem_2_1(const AlongCurve& data, const Tolerances& tol);
Corollary22Report verify_corollary_2_2(const CurvatureProfile& profile, double n, double mu, double tolerance);
Theorem22Report verify_theorem_2_2(const AlongCurve& data, const Tolerances& tol);
Theorem23Report verify_theorem_2_3(const AlongCurve& data, const Tolerances& tol);
CorollariesReport verify_corollaries_2_3_2_4(const AlongCurve& data, const Tolerances& tol);

Theorem21Report verify_theorem_2_1(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                                   std::span<const double> grid, const Tolerances& tol = {});
Theorem22Report verify_theorem_2_2(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                                   std::span<const double> grid, const Tolerances& tol = {});
Theorem23Report verify_theorem_2_3(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                                   std::span<const double> grid, const Tolerances& tol = {});
CorollariesReport verify_corollaries_2_3_2_4(const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g,
                                             std::span<const double> grid, const Tolerances& tol = {});

// ---------------------------------------------------------------------------

struct ClassificationReport {
  Tolerances tolerances;
  EikonalResult eikonal;
  AffineResult affine;
  HelixVerdict slant;
  HelixVerdict darboux;
  HelixVerdict non_normed;
  PrecessionResult precession;
  std::optional<AxisField> axis;  ///< present when the slant verdict holds
  /// Unchecked assumptions and hypothesis gaps, in a fixed order.
  std::vector<std::string> notes;
};

ClassificationReport classify(const AlongCurve& data, const Tolerances& tol);

}  // namespace helixlab
