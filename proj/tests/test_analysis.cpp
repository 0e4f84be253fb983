#include "helixlab/analysis.hpp"
#include "support.hpp"

using namespace helixlab;

namespace {

const double kPi = std::numbers::pi;
const double kR2 = std::numbers::sqrt2;

struct Pair {
  UnitSpeedCurve curve;
  ScalarField field;
  MetricField metric;
};

Pair example() {
  const Fixture fx = example_2_1();
  return {fx.curve, fx.field, fx.metric};
}

const PrecessionFixture& precession() {
  static const PrecessionFixture p = precession_fixture(2, 0.5);
  return p;
}

Pair precession_pair() {
  const auto& p = precession();
  return {p.fixture.curve, p.fixture.field, p.fixture.metric};
}

UnitSpeedCurve expr_curve(const std::string& x, const std::string& y, const std::string& z, double t0, double t1,
                          const MetricField& g = MetricField::euclidean()) {
  return UnitSpeedCurve::reparametrize(ParamCurve::from_expressions(parse(x), parse(y), parse(z), t0, t1), g);
}

AlongCurve measure(const Pair& p, std::size_t n = 1024) {
  return measure_along(p.field, p.curve, p.metric, uniform_grid(p.curve, n));
}

// κ = 1 + 0.3s, τ = 1 over [0, 4] with a linear (hence parallel) field.
Pair kappa_linear(const Vector3& v) {
  const auto out = integrate_frenet(profile_from_expressions(parse("1 + 0.3*s"), parse("1"), 0, 4, 4.0 / 8192));
  return {*out.curve, ScalarField::linear(v), MetricField::euclidean()};
}

const Tolerances kTol{};

}  // namespace

TEST(Constancy, Examples) {
  const std::vector<double> fives{5, 5, 5};
  const auto a = check_constancy(fives, 1e-6);
  EXPECT_TRUE(a.is_constant);
  EXPECT_EQ(a.mean, 5.0);
  EXPECT_EQ(a.scale, 5.0);
  const std::vector<double> step{0, 1};
  EXPECT_FALSE(check_constancy(step, 1e-6).is_constant);
  const std::vector<double> one{1};
  EXPECT_HELIX_ERROR(check_constancy(one, 1e-6), ErrorCode::EmptyGrid);
  const std::vector<double> bad{1, std::nan(""), 1};
  EXPECT_HELIX_ERROR(check_constancy(bad, 1e-6), ErrorCode::NonFiniteValue);
}

TEST(Eikonal, ExampleGradientNorm) {
  const auto p = example();
  const auto r = is_eikonal_along(p.field, p.curve, p.metric, uniform_grid(p.curve, 1024));
  EXPECT_TRUE(r.verdict());
  EXPECT_NEAR(r.norm.mean, std::sqrt(5.0), 1e-9);
  EXPECT_FALSE(r.zero_gradient);
}

TEST(Eikonal, ConstantFieldIsZeroGradient) {
  const auto c = expr_curve("cos(t)", "sin(t)", "t", 0, 3);
  const auto r = is_eikonal_along(ScalarField::constant(7), c, MetricField::euclidean(), uniform_grid(c, 64));
  EXPECT_TRUE(r.verdict());
  EXPECT_EQ(r.norm.mean, 0.0);
  EXPECT_TRUE(r.zero_gradient);
}

TEST(Eikonal, SquareOnSegmentIsNotEikonal) {
  const auto c = expr_curve("t", "0", "0", 1, 2);
  const auto grid = uniform_grid(c, 64);
  const auto r = is_eikonal_along(ScalarField::from_expression(parse("x^2")), c, MetricField::euclidean(), grid);
  EXPECT_FALSE(r.verdict());
  EXPECT_NEAR(r.norm.mean, 3.0, 1e-9);  // mean of 2s over [1, 2]
}

TEST(Affine, LinearFieldOnFixtureCurves) {
  const ScalarField f = ScalarField::linear(Vector3(1, 2, -1));
  for (const Pair& p : {example(), precession_pair(), kappa_linear(Vector3(1, 0, 0))}) {
    const auto r = is_affine_along(f, p.curve, p.metric, uniform_grid(p.curve, 512));
    EXPECT_TRUE(r.affine);
    EXPECT_LT(r.max_residual, 1e-9);
    EXPECT_LT(r.max_hessian_norm, 1e-12);
  }
}

TEST(Affine, ExampleFieldIsNotAffine) {
  const auto p = example();
  const auto r = is_affine_along(p.field, p.curve, p.metric, uniform_grid(p.curve, 1024));
  EXPECT_FALSE(r.affine);
  EXPECT_NEAR(r.max_residual, kR2, 1e-6);
  EXPECT_NEAR(r.max_hessian_norm, 2 * kR2, 1e-9);
}

TEST(Affine, CoordinateFieldInHalfSpace) {
  const MetricField g = MetricField::half_space();
  const auto c = expr_curve("t", "0.5*t", "2 + sin(t)", 0, 3, g);
  const auto r = is_affine_along(ScalarField::linear(Vector3(1, 0, 0)), c, g, uniform_grid(c, 128));
  EXPECT_FALSE(r.affine);
  EXPECT_GT(r.max_residual, 1e-3);
}

TEST(Slant, ExamplePair) {
  const auto p = example();
  const auto r = classify_slant_helix(p.field, p.curve, p.metric, uniform_grid(p.curve, 1024));
  EXPECT_TRUE(r.verdict);
  EXPECT_TRUE(r.nonzero);
  EXPECT_NEAR(r.value.mean, -2.0, 1e-8);
}

TEST(Slant, AxisAlignedFieldOnHelixIsZeroConstant) {
  const auto c = expr_curve("2*cos(t)", "2*sin(t)", "t", 0, 4 * kPi);
  const auto r = classify_slant_helix(ScalarField::linear(Vector3(0, 0, 1)), c, MetricField::euclidean(),
                                      uniform_grid(c, 512));
  EXPECT_TRUE(r.value.is_constant);
  EXPECT_LE(std::abs(r.value.mean), 1e-10);
  EXPECT_FALSE(r.nonzero);
  EXPECT_FALSE(r.verdict);
}

TEST(Slant, PerturbedCurveRejected) {
  std::mt19937_64 rng(5);
  const auto c = testing_support::make_curve(testing_support::random_curve(rng), MetricField::euclidean());
  const auto r = classify_slant_helix(ScalarField::linear(Vector3(1, 0, 0)), c, MetricField::euclidean(),
                                      uniform_grid(c, 256));
  EXPECT_FALSE(r.value.is_constant);
  EXPECT_FALSE(r.verdict);
}

TEST(Darboux, ExamplePair) {
  const auto p = example();
  const auto grid = uniform_grid(p.curve, 1024);
  const auto d = classify_darboux_helix(p.field, p.curve, p.metric, grid);
  EXPECT_TRUE(d.verdict);
  EXPECT_NEAR(d.value.mean, 1.0, 1e-8);
  const auto w = classify_non_normed_darboux(p.field, p.curve, p.metric, grid);
  EXPECT_TRUE(w.verdict);
  EXPECT_NEAR(w.value.mean, kR2 / 2, 1e-8);
}

TEST(Darboux, PrecessionFixture) {
  const auto p = precession_pair();
  const auto grid = uniform_grid(p.curve, 2048);
  const double n = 2 / std::sqrt(4.25);
  const auto d = classify_darboux_helix(p.field, p.curve, p.metric, grid);
  EXPECT_TRUE(d.verdict);
  EXPECT_NEAR(std::abs(d.value.mean), n, 1e-6);
  const auto w = classify_non_normed_darboux(p.field, p.curve, p.metric, grid);
  EXPECT_TRUE(w.verdict);
  EXPECT_NEAR(std::abs(w.value.mean), 2 * n, 1e-6);
}

TEST(Darboux, FieldAlongNormalOnly) {
  // Unit circle in the plane x = 0 with f = -(y² + z²)/2: ∇f = N, so ∇f ⟂ T, B and g(∇f, W0) ≡ 0.
  const auto c = expr_curve("0", "cos(t)", "sin(t)", 0, 6);
  const auto grid = uniform_grid(c, 128);
  const ScalarField f = ScalarField::from_expression(parse("-(y^2 + z^2)/2"));
  const auto d = classify_darboux_helix(f, c, MetricField::euclidean(), grid);
  EXPECT_TRUE(d.value.is_constant);
  EXPECT_NEAR(d.value.mean, 0.0, 1e-12);
  const auto data = measure_along(f, c, MetricField::euclidean(), grid);
  for (const auto& a : data.samples) {
    EXPECT_NEAR(a.components[0], 0.0, 1e-12);
    EXPECT_NEAR(a.components[2], 0.0, 1e-12);
  }
}

TEST(Darboux, PlanarCurveReducesToCurvature) {
  const ScalarField height = ScalarField::linear(Vector3(0, 0, 1));
  const auto circle = expr_curve("cos(t)", "sin(t)", "0", 0, 6);
  const auto rc = classify_non_normed_darboux(height, circle, MetricField::euclidean(), uniform_grid(circle, 128));
  EXPECT_TRUE(rc.verdict);
  EXPECT_NEAR(std::abs(rc.value.mean), 1.0, 1e-9);
  const auto ellipse = expr_curve("cos(t)", "2*sin(t)", "0", 0, 6);
  const auto re = classify_non_normed_darboux(height, ellipse, MetricField::euclidean(), uniform_grid(ellipse, 128));
  EXPECT_FALSE(re.value.is_constant);
}

TEST(Precession, ProfileChecks) {
  const auto fit = check_constant_precession(tabulate(constant_precession_profile(2, 0.5, 0.2, 6.0, 0.01), 512), 1e-6);
  EXPECT_TRUE(fit.verdict);
  EXPECT_NEAR(fit.w, 2.0, 1e-6);
  EXPECT_NEAR(fit.mu, 0.5, 1e-6);
  EXPECT_FALSE(fit.general_helix);

  CurvatureProfile flat, linear;
  for (int i = 0; i < 64; ++i) {
    const double s = i * 0.1;
    flat.s.push_back(s);
    flat.kappa.push_back(0.5);
    flat.tau.push_back(0.5);
    linear.s.push_back(s);
    linear.kappa.push_back(1 + 0.3 * s);
    linear.tau.push_back(1);
  }
  const auto g = check_constant_precession(flat, 1e-6);
  EXPECT_TRUE(g.radius2.is_constant);
  EXPECT_NEAR(g.mu, 0.0, 1e-12);
  EXPECT_TRUE(g.general_helix);
  EXPECT_FALSE(check_constant_precession(linear, 1e-6).verdict);

  CurvatureProfile few{{0, 1, 2}, {1, 1, 1}, {1, 1, 1}};
  EXPECT_HELIX_ERROR(check_constant_precession(few, 1e-6), ErrorCode::InsufficientSamples);
  CurvatureProfile one{{0}, {1}, {1}};
  EXPECT_HELIX_ERROR(check_constant_precession(one, 1e-6), ErrorCode::EmptyGrid);
}

TEST(Axis, ExamplePair) {
  const auto p = example();
  const auto grid = uniform_grid(p.curve, 1024);
  const AxisField a = reconstruct_axis(p.field, p.curve, p.metric, grid);
  EXPECT_NEAR(a.n, 1.0, 1e-8);
  EXPECT_NEAR(a.cos_theta, -2.0, 1e-8);
  EXPECT_LT(a.max_deviation, 1e-6);
  for (const AxisPoint& q : a.points) {
    const Vector3 expected(1, 2 * std::cos(q.s / kR2), 2 * std::sin(q.s / kR2));
    EXPECT_LT((q.axis - expected).norm(), 1e-6);
  }
}

TEST(Axis, PrecessionIsAmbientConstant) {
  const auto p = precession_pair();
  const AxisField a = reconstruct_axis(p.field, p.curve, p.metric, uniform_grid(p.curve, 2048));
  EXPECT_LT(a.max_deviation, 1e-4);
  ASSERT_TRUE(a.ambient_deviation);
  EXPECT_LT(*a.ambient_deviation, 1e-4);
  // independent oracle: least-squares constant of the axis samples is the mean; compare to the fitted D
  Vector3 mean = Vector3::Zero();
  for (const auto& q : a.points) mean += q.axis;
  mean /= static_cast<double>(a.points.size());
  EXPECT_LT((mean - precession().axis).norm(), 1e-4);
}

TEST(Axis, NonSlantThrows) {
  const auto c = expr_curve("2*cos(t)", "2*sin(t)", "t", 0, 6);
  EXPECT_HELIX_ERROR(reconstruct_axis(ScalarField::linear(Vector3(0, 0, 1)), c, MetricField::euclidean(),
                                      uniform_grid(c, 128)),
                     ErrorCode::NotSlantHelix);
}

TEST(Theorem21, PrecessionPasses) {
  const auto r = verify_theorem_2_1(measure(precession_pair(), 2048), kTol);
  EXPECT_EQ(r.status, CheckStatus::Pass);
  EXPECT_NEAR(r.invariant.mean, -0.25, 1e-6);
  EXPECT_LT(r.invariant.max_abs_deviation, 1e-4);
  ASSERT_TRUE(r.axis_deviation && r.ambient_deviation);
  EXPECT_LT(*r.axis_deviation, 1e-4);
  EXPECT_LT(*r.ambient_deviation, 1e-4);
}

TEST(Theorem21, ExamplePairFailsAffineHypothesis) {
  const auto r = verify_theorem_2_1(measure(example()), kTol);
  EXPECT_EQ(r.status, CheckStatus::HypothesisNotMet);
  EXPECT_FALSE(r.affine);
  EXPECT_TRUE(r.slant);
  EXPECT_TRUE(r.invariant.is_constant);
  EXPECT_NEAR(r.invariant.mean, 0.0, 1e-9);
}

TEST(Theorem21, GeneralHelixWithAxisField) {
  // τ/κ = 2 with nonconstant κ; the axis is the constant unit Darboux vector.
  const auto out = integrate_frenet(profile_from_expressions(parse("1 + 0.3*s"), parse("2 + 0.6*s"), 0, 4, 4.0 / 8192));
  const FrameState& f0 = out.frames.front();
  const Vector3 axis = (2 * f0.T + f0.B).normalized();
  const Pair p{*out.curve, ScalarField::linear(axis), MetricField::euclidean()};
  const auto data = measure(p, 512);
  const auto r = verify_theorem_2_1(data, kTol);
  EXPECT_FALSE(r.slant);
  EXPECT_EQ(r.status, CheckStatus::HypothesisNotMet);
  EXPECT_NEAR(classify_slant_helix(data, kTol).value.mean, 0.0, 1e-8);
}

TEST(Corollary22, Examples) {
  const double w = 2, mu = 0.5, r = std::sqrt(w * w + mu * mu);
  const auto prof = tabulate(constant_precession_profile(w, mu, 0.5, 5.5, 0.01), 1024);
  const auto ok = verify_corollary_2_2(prof, w / r, -mu / r, 1e-4);
  EXPECT_TRUE(ok.pass);
  EXPECT_LT(ok.max_residual_tangent, 1e-4);
  EXPECT_LT(ok.max_residual_binormal, 1e-4);

  CurvatureProfile flat, linear;
  for (int i = 0; i < 128; ++i) {
    const double s = i * 0.02;
    flat.s.push_back(s);
    flat.kappa.push_back(0.7);
    flat.tau.push_back(0.7);
    linear.s.push_back(s);
    linear.kappa.push_back(1 + s);
    linear.tau.push_back(1);
  }
  const auto zero = verify_corollary_2_2(flat, 0.3, 0.0, 1e-4);
  EXPECT_TRUE(zero.pass);
  EXPECT_LT(zero.max_residual_tangent, 1e-12);
  EXPECT_LT(zero.max_residual_binormal, 1e-12);
  EXPECT_FALSE(verify_corollary_2_2(linear, 1.0, 0.3, 1e-4).pass);

  flat.kappa[10] = 0.0;
  EXPECT_HELIX_ERROR(verify_corollary_2_2(flat, 0.3, 0.0, 1e-4), ErrorCode::DegenerateFrame);
}

TEST(Theorem22, ExamplePairImplicationAndDecomposition) {
  const auto r = verify_theorem_2_2(measure(example()), kTol);
  EXPECT_TRUE(r.slant);
  EXPECT_TRUE(r.darboux);
  EXPECT_TRUE(r.implication_holds);
  EXPECT_NEAR(r.n, 1.0, 1e-8);
  EXPECT_NEAR(r.cos_theta, -2.0, 1e-8);
  EXPECT_LT(r.decomposition_residual, 1e-6);
  EXPECT_EQ(r.status, CheckStatus::HypothesisNotMet);
}

TEST(Theorem22, PrecessionAndNonSlant) {
  const auto r = verify_theorem_2_2(measure(precession_pair(), 2048), kTol);
  EXPECT_EQ(r.status, CheckStatus::Pass);
  EXPECT_LT(r.decomposition_residual, 1e-4);
  const auto k = verify_theorem_2_2(measure(kappa_linear(Vector3(0.6, 0, 0.8))), kTol);
  EXPECT_FALSE(k.slant);
  EXPECT_EQ(k.status, CheckStatus::NotApplicable);
}

TEST(Theorem23, PrecessionPasses) {
  const auto r = verify_theorem_2_3(measure(precession_pair(), 2048), kTol);
  EXPECT_EQ(r.status, CheckStatus::Pass);
  EXPECT_TRUE(r.kappa2_tau2.is_constant);
  EXPECT_NEAR(r.kappa2_tau2.mean, 4.0, 1e-6);
  EXPECT_GT(r.a2_relation_points, 100u);
  EXPECT_LT(r.a2_relation_residual, 1e-4);
}

TEST(Theorem23, ExamplePairAgrees) {
  const auto r = verify_theorem_2_3(measure(example()), kTol);
  EXPECT_TRUE(r.agree);
  EXPECT_TRUE(r.slant);
  EXPECT_NEAR(r.kappa2_tau2.mean, 0.5, 1e-8);
  EXPECT_EQ(r.a2_relation_points, 0u);  // τ' ≡ 0
  EXPECT_EQ(r.status, CheckStatus::HypothesisNotMet);
}

TEST(Corollaries, PrecessionAndExample) {
  const auto p = verify_corollaries_2_3_2_4(measure(precession_pair(), 2048), kTol);
  EXPECT_EQ(p.status, CheckStatus::Pass);
  EXPECT_TRUE(p.cor_2_1 && p.cor_2_3 && p.cor_2_4);
  const auto e = verify_corollaries_2_3_2_4(measure(example()), kTol);
  EXPECT_TRUE(e.cor_2_1 && e.cor_2_3 && e.cor_2_4);
  EXPECT_TRUE(e.slant && e.darboux && e.precession && e.kappa2_tau2_constant);
}

TEST(Corollaries, LinearCurvatureNeverSplits) {
  std::mt19937_64 rng(66);
  for (int n = 0; n < 10; ++n) {
    const Vector3 v = testing_support::random_vector(rng).normalized();
    const auto r = verify_corollaries_2_3_2_4(measure(kappa_linear(v), 512), kTol);
    EXPECT_FALSE(r.kappa2_tau2_constant);
    EXPECT_EQ(r.slant, r.darboux);
    EXPECT_FALSE(r.precession);
    if (!r.non_normed) EXPECT_EQ(r.status, CheckStatus::NotApplicable);
  }
}

TEST(Classify, ExampleReport) {
  const auto r = classify(measure(example()), kTol);
  EXPECT_TRUE(r.eikonal.verdict());
  EXPECT_FALSE(r.affine.affine);
  EXPECT_TRUE(r.slant.verdict && r.darboux.verdict && r.non_normed.verdict);
  EXPECT_TRUE(r.precession.verdict);
  EXPECT_TRUE(r.precession.general_helix);
  ASSERT_TRUE(r.axis);
  EXPECT_FALSE(r.notes.empty());
}

TEST(Classify, Deterministic) {
  const auto a = measure(example()), b = measure(example());
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].cos_theta, b.samples[i].cos_theta);
    EXPECT_EQ(a.samples[i].affine_residual, b.samples[i].affine_residual);
    EXPECT_EQ(a.slant_invariant[i], b.slant_invariant[i]);
  }
}

TEST(Classify, GridRefinementStability) {
  for (const Pair& p : {example(), precession_pair()}) {
    const auto a = classify(measure(p, 1024), kTol), b = classify(measure(p, 2048), kTol);
    const double bound = 10 * kTol.constancy;
    EXPECT_LT(std::abs(a.eikonal.norm.mean - b.eikonal.norm.mean), bound);
    EXPECT_LT(std::abs(a.slant.value.mean - b.slant.value.mean), bound);
    EXPECT_LT(std::abs(a.darboux.value.mean - b.darboux.value.mean), bound);
    EXPECT_LT(std::abs(a.non_normed.value.mean - b.non_normed.value.mean), bound);
    EXPECT_LT(std::abs(a.precession.radius2.mean - b.precession.radius2.mean), bound);
  }
}

// ---------------------------------------------------------------------------
// Field scaling: c·f scales every measured constant and keeps every verdict.

namespace {

void expect_scaling(const Pair& p, double c, std::size_t n, const std::string& label) {
  const auto grid = uniform_grid(p.curve, n);
  const auto a = classify(measure_along(p.field, p.curve, p.metric, grid), kTol);
  const auto b = classify(measure_along(p.field.scaled(c), p.curve, p.metric, grid), kTol);
  EXPECT_EQ(a.eikonal.verdict(), b.eikonal.verdict()) << label;
  EXPECT_EQ(a.affine.affine, b.affine.affine) << label;
  EXPECT_EQ(a.slant.verdict, b.slant.verdict) << label;
  EXPECT_EQ(a.darboux.verdict, b.darboux.verdict) << label;
  EXPECT_EQ(a.non_normed.verdict, b.non_normed.verdict) << label;
  EXPECT_EQ(a.precession.verdict, b.precession.verdict) << label;
  const double tol = 1e-12 * std::max(1.0, std::abs(c));
  EXPECT_NEAR(b.eikonal.norm.mean, std::abs(c) * a.eikonal.norm.mean, tol * (1 + a.eikonal.norm.mean)) << label;
  EXPECT_NEAR(b.slant.value.mean, c * a.slant.value.mean, tol * (1 + std::abs(a.slant.value.mean))) << label;
  EXPECT_NEAR(b.darboux.value.mean, c * a.darboux.value.mean, tol * (1 + std::abs(a.darboux.value.mean))) << label;
  EXPECT_NEAR(b.non_normed.value.mean, c * a.non_normed.value.mean, tol * (1 + std::abs(a.non_normed.value.mean)))
      << label;
}

}  // namespace

TEST(AnalysisProperty, FieldScalingOnFixtures) {
  for (double c : {3.0, -2.0, 0.25}) {
    expect_scaling(example(), c, 512, "example");
    expect_scaling(precession_pair(), c, 1024, "precession");
  }
}

TEST(AnalysisProperty, FieldScalingOnRandomPairs) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> cdist(0.5, 4.0);
  const char* fields[] = {"x + 2*y - z", "x*y + z", "sin(x) + y^2", "exp(0.2*z) - x"};
  for (int n = 0; n < 50; ++n) {
    const auto rc = testing_support::random_curve(rng);
    const auto c = testing_support::make_curve(rc, MetricField::euclidean());
    const Pair p{c, ScalarField::from_expression(parse(fields[n % 4])), MetricField::euclidean()};
    const double k = (n % 2 ? -1.0 : 1.0) * cdist(rng);
    expect_scaling(p, k, 128, std::to_string(n));
  }
}
