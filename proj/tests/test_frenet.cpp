#include "helixlab/frenet.hpp"
#include "support.hpp"

using namespace helixlab;
using testing_support::central;

namespace {

const double kPi = std::numbers::pi;
const double kR2 = std::numbers::sqrt2;

UnitSpeedCurve helix(double a, double b, const MetricField& g = MetricField::euclidean()) {
  return UnitSpeedCurve::reparametrize(
      ParamCurve::from_expressions(parse(fmt::format("{}*cos(t)", a)), parse(fmt::format("{}*sin(t)", a)),
                                   parse(fmt::format("{}*t", b)), 0, 10),
      g);
}

}  // namespace

TEST(Frenet, ExampleApparatus) {
  const Fixture fx = example_2_1();
  for (double s : uniform_grid(fx.curve, 64)) {
    const FrenetSample f = frenet_apparatus(fx.curve, fx.metric, s);
    EXPECT_NEAR(f.kappa, 0.5, 1e-8);
    EXPECT_NEAR(f.tau, 0.5, 1e-8);
    EXPECT_LT((f.N - Vector3(0, -std::cos(s / kR2), -std::sin(s / kR2))).norm(), 1e-8);
    EXPECT_LT((f.W - Vector3(kR2 / 2, 0, 0)).norm(), 1e-8);
    EXPECT_LT((f.W0 - Vector3(1, 0, 0)).norm(), 1e-8);
  }
}

TEST(Frenet, CircularHelixOracle) {
  const auto c = helix(2, 1);
  for (double s : uniform_grid(c, 101)) {
    const FrenetSample f = frenet_apparatus(c, MetricField::euclidean(), s);
    EXPECT_NEAR(f.kappa, 0.4, 1e-8);
    EXPECT_NEAR(f.tau, 0.2, 1e-8);
    // W is the fixed axis direction scaled by sqrt(κ²+τ²).
    EXPECT_LT((f.W - Vector3(0, 0, std::sqrt(0.2))).norm(), 1e-8);
    EXPECT_LT((darboux(f) - (0.2 * f.T + 0.4 * f.B)).norm(), 1e-8);
  }
}

TEST(Frenet, StraightLineIsDegenerate) {
  const auto line = UnitSpeedCurve::reparametrize(
      ParamCurve::from_expressions(parse("t"), parse("0"), parse("0"), 0, 1), MetricField::euclidean());
  try {
    frenet_apparatus(line, MetricField::euclidean(), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateFrame);
    EXPECT_NE(std::string(e.what()).find("0.5"), std::string::npos) << e.what();
  }
}

TEST(Frenet, PlanarCurveHasZeroTorsion) {
  const auto c = UnitSpeedCurve::reparametrize(
      ParamCurve::from_expressions(parse("cos(t)"), parse("2*sin(t)"), parse("0"), 0, 6), MetricField::euclidean());
  for (double s : uniform_grid(c, 50)) {
    const FrenetSample f = frenet_apparatus(c, MetricField::euclidean(), s);
    EXPECT_NEAR(f.tau, 0.0, 1e-8);
    EXPECT_LT((darboux(f) - f.kappa * f.B).norm(), 1e-12);
    EXPECT_LT((unit_darboux(f) - f.B).norm(), 1e-12);
  }
}

TEST(SlantInvariant, Examples) {
  CurvatureProfile constant;
  for (int i = 0; i < 64; ++i) {
    constant.s.push_back(i * 0.1);
    constant.kappa.push_back(0.5);
    constant.tau.push_back(0.5);
  }
  for (double v : slant_invariant_series(constant)) EXPECT_EQ(v, 0.0);

  CurvatureProfile general;  // τ/κ = 3 with nonconstant κ
  for (int i = 0; i < 64; ++i) {
    const double s = i * 0.05;
    general.s.push_back(s);
    general.kappa.push_back(1 + s * s);
    general.tau.push_back(3 * (1 + s * s));
  }
  for (double v : slant_invariant_series(general)) EXPECT_NEAR(v, 0.0, 1e-8);

  CurvatureProfile prec;
  for (int i = 0; i < 512; ++i) {
    const double s = 0.3 + 5.6 * i / 511.0;
    prec.s.push_back(s);
    prec.kappa.push_back(2 * std::sin(0.5 * s));
    prec.tau.push_back(2 * std::cos(0.5 * s));
  }
  for (double v : slant_invariant_series(prec)) EXPECT_NEAR(v, -0.25, 1e-5);
  EXPECT_NEAR(slant_invariant(prec, 2.0), -0.25, 1e-6);

  prec.kappa[100] = 0.0;
  EXPECT_HELIX_ERROR(slant_invariant(prec, prec.s[100]), ErrorCode::DegenerateFrame);
}

TEST(Profile, Validation) {
  CurvatureProfile p{{0, 1, 1}, {1, 1, 1}, {0, 0, 0}};
  EXPECT_HELIX_ERROR(validate_profile(p), ErrorCode::NonMonotoneParameter);
  CurvatureProfile q{{0, 1, 2}, {1, 0, 1}, {0, 0, 0}};
  EXPECT_HELIX_ERROR(validate_profile(q), ErrorCode::DegenerateFrame);
}

// ---------------------------------------------------------------------------
// Randomized properties: frame orthonormality, Frenet and Darboux residuals,
// rigid-motion invariance. Curves are random perturbed helices.

namespace {

struct Case {
  MetricField metric;
  UnitSpeedCurve curve;
};

Case random_case(std::mt19937_64& rng, int n) {
  auto rc = testing_support::random_curve(rng);
  if (n % 3 == 2) {
    rc.z = "3 + 0.4*sin(t)";
    return {MetricField::half_space(), testing_support::make_curve(rc, MetricField::half_space())};
  }
  return {MetricField::euclidean(), testing_support::make_curve(rc, MetricField::euclidean())};
}

// Stencil step scaled to the frame's rotation rate.
Vector3 covd(const Case& c, const std::function<Vector3(double)>& X, double s) {
  const FrenetSample f = frenet_apparatus(c.curve, c.metric, s);
  return covariant_derivative_along(c.curve, c.metric, X, s, 1e-3 / std::max({1.0, f.kappa, std::abs(f.tau)}));
}

}  // namespace

TEST(FrenetProperty, OrthonormalFrameAndResiduals) {
  std::mt19937_64 rng(101);
  for (int n = 0; n < 60; ++n) {
    const Case c = random_case(rng, n);
    const auto grid = uniform_grid(c.curve, 17);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const double s = grid[i];
      const FrenetSample f = frenet_apparatus(c.curve, c.metric, s);
      const MetricAt m = c.metric.at(f.position);
      EXPECT_NEAR(m.inner(f.T, f.T), 1.0, 1e-6);
      EXPECT_NEAR(m.inner(f.N, f.N), 1.0, 1e-6);
      EXPECT_NEAR(m.inner(f.B, f.B), 1.0, 1e-6);
      EXPECT_LT(std::abs(m.inner(f.T, f.N)) + std::abs(m.inner(f.T, f.B)) + std::abs(m.inner(f.N, f.B)), 1e-6);
      EXPECT_LT((f.B - m.cross(f.T, f.N)).norm(), 1e-6);
      EXPECT_NEAR(m.norm(f.W0), 1.0, 1e-8);

      auto frame = [&](double u) { return frenet_apparatus(c.curve, c.metric, u); };
      const Vector3 dT = covd(c, [&](double u) { return frame(u).T; }, s);
      const Vector3 dN = covd(c, [&](double u) { return frame(u).N; }, s);
      const Vector3 dB = covd(c, [&](double u) { return frame(u).B; }, s);
      EXPECT_LT(m.norm(dT - f.kappa * f.N), 1e-5) << n;
      EXPECT_LT(m.norm(dN + f.kappa * f.T - f.tau * f.B), 1e-5) << n;
      EXPECT_LT(m.norm(dB + f.tau * f.N), 1e-5) << n;
      // Darboux: ∇_T X = W × X
      EXPECT_LT(m.norm(dT - m.cross(f.W, f.T)), 1e-5);
      EXPECT_LT(m.norm(dN - m.cross(f.W, f.N)), 1e-5);
      EXPECT_LT(m.norm(dB - m.cross(f.W, f.B)), 1e-5);
    }
  }
}

TEST(FrenetProperty, EuclideanAgreesWithClassicalFormulas) {
  std::mt19937_64 rng(102);
  for (int n = 0; n < 50; ++n) {
    const auto rc = testing_support::random_curve(rng);
    const auto pc = ParamCurve::from_expressions(parse(rc.x), parse(rc.y), parse(rc.z), 0, rc.t_max);
    const auto c = UnitSpeedCurve::reparametrize(pc, MetricField::euclidean());
    const double t = 0.5 * rc.t_max;
    const double h = 1e-3;
    const Vector3 d3 = central([&](double u) { return pc.second_derivative(u); }, t, h);
    const auto oracle = testing_support::euclidean_kappa_tau(pc.derivative(t), pc.second_derivative(t), d3);
    const FrenetSample f = frenet_apparatus(c, MetricField::euclidean(), c.s_of(t));
    EXPECT_NEAR(f.kappa, oracle.kappa, 1e-8);
    EXPECT_NEAR(f.tau, oracle.tau, 1e-7);
  }
}

TEST(FrenetProperty, RigidMotionInvariance) {
  std::mt19937_64 rng(103);
  const MetricField e = MetricField::euclidean();
  for (int n = 0; n < 50; ++n) {
    const auto rc = testing_support::random_curve(rng);
    const auto pc = ParamCurve::from_expressions(parse(rc.x), parse(rc.y), parse(rc.z), 0, rc.t_max);
    const auto a = UnitSpeedCurve::reparametrize(pc, e);
    const auto b = UnitSpeedCurve::reparametrize(
        pc.transformed(testing_support::random_rotation(rng), testing_support::random_vector(rng, 10)), e);
    const auto grid = uniform_grid(a, 64);
    const auto fa = frenet_series(a, e, grid), fb = frenet_series(b, e, grid);
    const auto ia = slant_invariant_series(measure_profile(fa)), ib = slant_invariant_series(measure_profile(fb));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_NEAR(fa[i].kappa, fb[i].kappa, 1e-8);
      EXPECT_NEAR(fa[i].tau, fb[i].tau, 1e-8);
      EXPECT_NEAR(ia[i], ib[i], 1e-8);
    }
  }
}

TEST(Frenet, CurveLeavingHalfSpaceIsRejected) {
  EXPECT_HELIX_ERROR(helix(1, 0.5, MetricField::half_space()), ErrorCode::DomainError);
}
