// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "helixlab/analysis.hpp"
#include "helixlab/cli.hpp"
#include "helixlab/generate.hpp"

using namespace helixlab;

namespace {

const double kPi = std::numbers::pi;
const double kR2 = std::numbers::sqrt2;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

Vector3 central(const std::function<Vector3(double)>& f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

double central(const std::function<double(double)>& f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

UnitSpeedCurve expr_curve(const std::string& x, const std::string& y, const std::string& z, double t0, double t1,
                          const MetricField& g = MetricField::euclidean()) {
  return UnitSpeedCurve::reparametrize(ParamCurve::from_expressions(parse(x), parse(y), parse(z), t0, t1), g);
}

// Perturbed helix with random coefficients; curvature stays away from zero.
UnitSpeedCurve random_curve(std::mt19937_64& rng, const MetricField& g, bool lifted) {
  std::uniform_real_distribution<double> r(1.0, 2.0), b(0.3, 1.0), p(-0.05, 0.05);
  const double a = r(rng), c = b(rng);
  const std::string z = lifted ? fmt::format("3 + 0.4*sin({:.17g}*t)", c) : fmt::format("{:.17g}*t + {:.17g}*t^2", c, p(rng));
  return expr_curve(fmt::format("{:.17g}*cos(t) + {:.17g}*t^2", a, p(rng)),
                    fmt::format("{:.17g}*sin(t) + {:.17g}*t^3", a, p(rng)), z, 0, 2 + r(rng), g);
}

Matrix3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

Vector3 random_vector(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

const PrecessionFixture& precession() {
  static const PrecessionFixture p = precession_fixture(2, 0.5);
  return p;
}

UnitSpeedCurve kappa_linear_curve() {
  return *integrate_frenet(profile_from_expressions(parse("1 + 0.3*s"), parse("1"), 0, 4, 4.0 / 8192)).curve;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const Fixture fx = example_2_1();
  const AlongCurve data = measure_along(fx.field, fx.curve, fx.metric, uniform_grid(fx.curve, 1024));
  const ClassificationReport r = classify(data, Tolerances{});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  double e_grad = 0, e_cos = 0, e_kt = 0, e_w = 0, e_gw = 0;
  for (const AlongSample& a : data.samples) {
    e_grad = std::max(e_grad, std::abs(a.grad_norm - std::sqrt(5.0)));
    e_cos = std::max(e_cos, std::abs(a.cos_theta + 2));
    e_kt = std::max({e_kt, std::abs(a.frame.kappa - 0.5), std::abs(a.frame.tau - 0.5)});
    e_w = std::max(e_w, (a.frame.W - Vector3(kR2 / 2, 0, 0)).cwiseAbs().maxCoeff());
    e_gw = std::max(e_gw, std::abs(a.darboux_w - kR2 / 2));
  }
  o.require(e_grad <= 1e-9, fmt::format("|grad f| error {:.3g}", e_grad));
  o.require(e_cos <= 1e-8, fmt::format("cos theta error {:.3g}", e_cos));
  o.require(e_kt <= 1e-8, fmt::format("kappa/tau error {:.3g}", e_kt));
  o.require(e_w <= 1e-8, fmt::format("W error {:.3g}", e_w));
  o.require(e_gw <= 1e-8, fmt::format("g(grad f, W) error {:.3g}", e_gw));
  o.require(r.slant.verdict && r.darboux.verdict && r.non_normed.verdict, "verdicts");
  o.require(std::abs(r.darboux.value.mean - 1) <= 1e-8, "n != 1");
  o.require(seconds < 1.0, fmt::format("runtime {:.3f} s", seconds));
  if (o.pass)
    o.detail = fmt::format("max errors grad {:.1e}, cos {:.1e}, kappa/tau {:.1e}, W {:.1e}; {:.0f} ms", e_grad, e_cos,
                           e_kt, e_w, seconds * 1e3);
  return o;
}

Outcome criterion2() {
  Outcome o;
  const Fixture fx = example_2_1();
  const MetricField e = MetricField::euclidean();
  const ScalarField lin = ScalarField::linear(Vector3(1, 2, -1));
  const std::vector<std::pair<std::string, UnitSpeedCurve>> curves{
      {"example", fx.curve},
      {"precession", precession().fixture.curve},
      {"kappa_linear", kappa_linear_curve()},
      {"helix", expr_curve("2*cos(t)", "2*sin(t)", "t", 0, 4 * kPi)},
      {"circle", expr_curve("cos(t)", "sin(t)", "0", 0, 2 * kPi)}};
  double worst = 0;
  for (const auto& [name, c] : curves) {
    const AffineResult a = is_affine_along(lin, c, e, uniform_grid(c, 512));
    worst = std::max(worst, a.max_residual);
    o.require(a.affine && a.max_residual < 1e-9, name + fmt::format(" residual {:.3g}", a.max_residual));
  }
  const AffineResult p = is_affine_along(fx.field, fx.curve, fx.metric, uniform_grid(fx.curve, 1024));
  o.require(!p.affine && std::abs(p.max_residual - kR2) <= 1e-6,
            fmt::format("example residual {:.17g}", p.max_residual));
  if (o.pass) o.detail = fmt::format("linear worst {:.1e}; example residual {:.12f}", worst, p.max_residual);
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto c = expr_curve("2*cos(t)", "2*sin(t)", "t", 0, 4 * kPi);
  double ek = 0, et = 0;
  for (const FrenetSample& f : frenet_series(c, MetricField::euclidean(), uniform_grid(c, 1024))) {
    ek = std::max(ek, std::abs(f.kappa - 2.0 / 5.0));
    et = std::max(et, std::abs(f.tau - 1.0 / 5.0));
  }
  o.require(ek <= 1e-8 && et <= 1e-8, fmt::format("kappa err {:.3g}, tau err {:.3g}", ek, et));
  if (o.pass) o.detail = fmt::format("kappa err {:.1e}, tau err {:.1e}", ek, et);
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto& p = precession();
  const AlongCurve data =
      measure_along(p.fixture.field, p.fixture.curve, p.fixture.metric, uniform_grid(p.fixture.curve, 2048));
  const Theorem21Report r = verify_theorem_2_1(data, Tolerances{});
  const double target = -p.mu / p.w;
  double dev = 0;
  for (double v : data.slant_invariant) dev = std::max(dev, std::abs(v - target));
  o.require(dev < 1e-4, fmt::format("invariant deviation from -mu/w {:.3g}", dev));
  o.require(r.axis_deviation && *r.axis_deviation < 1e-4, "axis deviation");
  o.require(r.ambient_deviation && *r.ambient_deviation < 1e-4, "ambient deviation");

  // oracle: least-squares constant fit of the reconstructed axis samples
  const AxisField a = reconstruct_axis(data, Tolerances{});
  Vector3 mean = Vector3::Zero();
  for (const AxisPoint& q : a.points) mean += q.axis;
  mean /= static_cast<double>(a.points.size());
  double fit = 0;
  for (const AxisPoint& q : a.points) fit = std::max(fit, (q.axis - mean).norm());
  o.require(fit < 1e-4, fmt::format("constant-vector fit residual {:.3g}", fit));
  o.require(r.status == CheckStatus::Pass, "status " + std::string(to_string(r.status)));
  if (o.pass)
    o.detail = fmt::format("invariant dev {:.1e}, axis dev {:.1e}, ambient dev {:.1e}", dev, *r.axis_deviation,
                           *r.ambient_deviation);
  return o;
}

Outcome criterion5() {
  Outcome o;
  const Fixture fx = example_2_1();
  const auto& p = precession();
  std::string detail;
  for (const auto& [name, f, grid] : {std::tuple<std::string, const Fixture*, std::size_t>{"example", &fx, 1024},
                                      {"precession", &p.fixture, 2048}}) {
    const Theorem22Report r =
        verify_theorem_2_2(measure_along(f->field, f->curve, f->metric, uniform_grid(f->curve, grid)), Tolerances{});
    o.require(r.slant && r.darboux && r.implication_holds, name + " implication");
    o.require(r.decomposition_residual < 1e-4, name + fmt::format(" decomposition {:.3g}", r.decomposition_residual));
    detail += fmt::format("{}{} decomposition {:.1e}", detail.empty() ? "" : ", ", name, r.decomposition_residual);
  }
  if (o.pass) o.detail = detail;
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto& p = precession();
  const Tolerances tol{};
  const AlongCurve data =
      measure_along(p.fixture.field, p.fixture.curve, p.fixture.metric, uniform_grid(p.fixture.curve, 2048));
  const Theorem23Report t = verify_theorem_2_3(data, tol);
  const CorollariesReport c = verify_corollaries_2_3_2_4(data, tol);
  o.require(t.status == CheckStatus::Pass && t.agree, "precession thm2.3");
  o.require(c.status == CheckStatus::Pass && c.cor_2_1 && c.cor_2_3 && c.cor_2_4, "precession corollaries");
  o.require(t.a2_relation_points > 0 && t.a2_relation_residual < 1e-4,
            fmt::format("a2 relation residual {:.3g} on {} points", t.a2_relation_residual, t.a2_relation_points));

  // κ = 1 + 0.3s: parallel (linear) fields in several directions
  const UnitSpeedCurve k = kappa_linear_curve();
  const auto grid = uniform_grid(k, 1024);
  std::mt19937_64 rng(6);
  for (int i = 0; i < 8; ++i) {
    const Vector3 v = i == 0 ? Vector3(1, 0, 0) : random_vector(rng, 1).normalized();
    const AlongCurve d = measure_along(ScalarField::linear(v), k, MetricField::euclidean(), grid);
    const CorollariesReport r = verify_corollaries_2_3_2_4(d, tol);
    o.require(!r.kappa2_tau2_constant, "kappa^2+tau^2 constant on counterfixture");
    o.require(r.slant == r.darboux && r.slant == r.precession &&
                  (r.non_normed && r.kappa2_tau2_constant) == r.darboux,
              fmt::format("verdict split for direction {}", i));
  }
  if (o.pass)
    o.detail = fmt::format("precession equivalences hold, a2 residual {:.1e} on {} points; counterfixture unsplit",
                           t.a2_relation_residual, t.a2_relation_points);
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(7);
  double cov = 0, sys = 0, nrm = 0;
  for (int n = 0; n < 12; ++n) {
    const bool curved = n % 2 == 1;
    const MetricField g = curved ? MetricField::half_space() : MetricField::euclidean();
    const UnitSpeedCurve c = random_curve(rng, g, curved);
    const auto grid = uniform_grid(c, 257);
    const Vector3 v0 = random_vector(rng, 2);
    const TransportedField V = parallel_transport(c, g, v0, grid);
    const double n0 = inner(g, c.position(0), v0, v0);
    for (std::size_t i = 0; i < grid.size(); ++i)
      nrm = std::max(nrm, std::abs(inner(g, c.position(grid[i]), V.values()[i], V.values()[i]) - n0));
    for (std::size_t i = 8; i + 8 < grid.size(); i += 8) {
      const double s = grid[i];
      cov = std::max(cov, norm(g, c.position(s), covariant_derivative_along(c, g, [&](double u) { return V(u); }, s)));
      auto comp = [&](double u) {
        const FrenetSample f = frenet_apparatus(c, g, u);
        const MetricAt m = g.at(f.position);
        const Vector3 v = V(u);
        return Vector3(m.inner(v, f.T), m.inner(v, f.N), m.inner(v, f.B));
      };
      const FrenetSample f = frenet_apparatus(c, g, s);
      const Vector3 a = comp(s), da = central(comp, s, 1e-3);
      sys = std::max({sys, std::abs(da[0] - f.kappa * a[1]), std::abs(da[1] + f.kappa * a[0] - f.tau * a[2]),
                      std::abs(da[2] + f.tau * a[1])});
    }
  }
  o.require(cov < 1e-6, fmt::format("|nabla_T V| {:.3g}", cov));
  o.require(sys < 1e-4, fmt::format("system residual {:.3g}", sys));
  o.require(nrm < 1e-8, fmt::format("norm drift {:.3g}", nrm));
  if (o.pass) o.detail = fmt::format("|nabla_T V| {:.1e}, system {:.1e}, norm drift {:.1e}", cov, sys, nrm);
  return o;
}

double circle_closure(std::size_t steps) {
  ProfileSpec p;
  p.kappa = [](double) { return 1.0; };
  p.tau = [](double) { return 0.0; };
  p.s_end = 2 * kPi;
  p.step = 2 * kPi / static_cast<double>(steps);
  const FrenetIntegration out = integrate_frenet(p);
  return (out.frames.back().position - out.frames.front().position).norm();
}

Outcome criterion8() {
  Outcome o;
  const double e64 = circle_closure(64), e128 = circle_closure(128), e4096 = circle_closure(4096);
  o.require(e64 / e128 >= 12, fmt::format("ratio {:.3f}", e64 / e128));
  o.require(e4096 < 1e-6, fmt::format("closure {:.3g}", e4096));
  if (o.pass) o.detail = fmt::format("ratio {:.2f}, closure at 2pi/4096 {:.1e}", e64 / e128, e4096);
  return o;
}

Outcome criterion9() {
  Outcome o;
  constexpr int kFixtures = 50;
  std::mt19937_64 rng(9);
  double ortho = 0, ode = 0, crossorth = 0, duality = 0, rigid = 0;
  int scaling_mismatch = 0;

  for (int n = 0; n < kFixtures; ++n) {
    const bool curved = n % 3 == 2;
    const MetricField g = curved ? MetricField::half_space() : MetricField::euclidean();
    const UnitSpeedCurve c = random_curve(rng, g, curved);
    const auto grid = uniform_grid(c, 9);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const double s = grid[i];
      const FrenetSample f = frenet_apparatus(c, g, s);
      const MetricAt m = g.at(f.position);
      ortho = std::max({ortho, std::abs(m.inner(f.T, f.T) - 1), std::abs(m.inner(f.N, f.N) - 1),
                        std::abs(m.inner(f.B, f.B) - 1), std::abs(m.inner(f.T, f.N)), std::abs(m.inner(f.T, f.B)),
                        std::abs(m.inner(f.N, f.B))});
      // stencil step scaled to the frame's rotation rate
      const double h = 1e-3 / std::max({1.0, f.kappa, std::abs(f.tau)});
      auto frame = [&](double u) { return frenet_apparatus(c, g, u); };
      const Vector3 dT = covariant_derivative_along(c, g, [&](double u) { return frame(u).T; }, s, h);
      const Vector3 dN = covariant_derivative_along(c, g, [&](double u) { return frame(u).N; }, s, h);
      const Vector3 dB = covariant_derivative_along(c, g, [&](double u) { return frame(u).B; }, s, h);
      ode = std::max({ode, m.norm(dT - f.kappa * f.N), m.norm(dN + f.kappa * f.T - f.tau * f.B),
                      m.norm(dB + f.tau * f.N), m.norm(dT - m.cross(f.W, f.T)), m.norm(dN - m.cross(f.W, f.N)),
                      m.norm(dB - m.cross(f.W, f.B))});
    }

    // cross product and gradient duality at a random point of the upper half space
    const Point3 p(random_vector(rng, 2).x(), random_vector(rng, 2).y(), 1 + std::abs(random_vector(rng, 2).z()));
    const Vector3 x = random_vector(rng, 1), y = random_vector(rng, 1);
    const MetricAt m = g.at(p);
    const Vector3 xy = m.cross(x, y);
    crossorth = std::max({crossorth, std::abs(m.inner(xy, x)), std::abs(m.inner(xy, y))});
    const ScalarField f = ScalarField::from_expression(parse("sin(x)*y + z^2 - x*z"));
    const Vector3 grad = gradient(f, g, p);
    const double df = central([&](double h) { return f.eval(p + h * x); }, 0.0, 1e-4);
    duality = std::max(duality, std::abs(m.inner(grad, x) - df) / std::max(1.0, std::abs(df)));

    // field scaling keeps verdicts
    const auto sgrid = uniform_grid(c, 128);
    const ScalarField field = ScalarField::linear(random_vector(rng, 1));
    const double k = n % 2 ? -3.0 : 0.5;
    const auto a = classify(measure_along(field, c, g, sgrid), Tolerances{});
    const auto b = classify(measure_along(field.scaled(k), c, g, sgrid), Tolerances{});
    if (a.eikonal.verdict() != b.eikonal.verdict() || a.affine.affine != b.affine.affine ||
        a.slant.verdict != b.slant.verdict || a.darboux.verdict != b.darboux.verdict ||
        a.non_normed.verdict != b.non_normed.verdict || a.precession.verdict != b.precession.verdict)
      ++scaling_mismatch;

    // rigid motion invariance (Euclidean)
    const UnitSpeedCurve e = random_curve(rng, MetricField::euclidean(), false);
    const UnitSpeedCurve moved = UnitSpeedCurve::reparametrize(
        e.param().transformed(random_rotation(rng), random_vector(rng, 10)), MetricField::euclidean());
    const auto rg = uniform_grid(e, 64);
    const auto fa = frenet_series(e, MetricField::euclidean(), rg), fb = frenet_series(moved, MetricField::euclidean(), rg);
    const auto ia = slant_invariant_series(measure_profile(fa)), ib = slant_invariant_series(measure_profile(fb));
    for (std::size_t i = 0; i < rg.size(); ++i)
      rigid = std::max({rigid, std::abs(fa[i].kappa - fb[i].kappa), std::abs(fa[i].tau - fb[i].tau),
                        std::abs(ia[i] - ib[i])});
  }
  o.require(ortho < 1e-6, fmt::format("orthonormality {:.3g}", ortho));
  o.require(ode < 1e-5, fmt::format("ODE residual {:.3g}", ode));
  o.require(crossorth < 1e-9, fmt::format("cross orthogonality {:.3g}", crossorth));
  o.require(duality < 1e-5, fmt::format("gradient duality {:.3g}", duality));
  o.require(scaling_mismatch == 0, fmt::format("{} scaling mismatches", scaling_mismatch));
  o.require(rigid < 1e-8, fmt::format("rigid motion {:.3g}", rigid));
  if (o.pass)
    o.detail = fmt::format("{} fixtures: ortho {:.1e}, ODE {:.1e}, cross {:.1e}, duality {:.1e}, rigid {:.1e}",
                           kFixtures, ortho, ode, crossorth, duality, rigid);
  return o;
}

Outcome criterion10() {
  Outcome o;
  const std::string config = (std::filesystem::path(HELIXLAB_SOURCE_DIR) / "configs" / "example_2_1.cfg").string();
  std::string reports[2];
  for (auto& r : reports) {
    std::ostringstream out, err;
    const int code = cli::run({"classify", "--config", config}, out, err);
    o.require(code == 0, "classify exit " + std::to_string(code) + ": " + err.str());
    r = out.str();
  }
  o.require(!reports[0].empty() && reports[0] == reports[1], "reports differ");
  if (o.pass) o.detail = fmt::format("{} identical bytes", reports[0].size());
  return o;
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << o.detail << '\n' << std::flush;
  }
  return failed == 0 ? 0 : 1;
}
