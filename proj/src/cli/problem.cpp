#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "helixlab/cli.hpp"
#include "helixlab/error.hpp"

namespace helixlab::cli {

SampledCurve read_curve_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot read curve CSV '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  SampledCurve out;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find('\r') != std::string_view::npos)
      throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: CR line endings are not accepted", path, line_no));
    if (line_no == 1) {
      if (line != "t,x,y,z")
        throw Error(ErrorCode::ConfigError, fmt::format("{}:1: header must be 't,x,y,z'", path));
      continue;
    }
    if (line.empty()) continue;
    double v[4];
    const char* p = line.data();
    const char* const stop = line.data() + line.size();
    for (int k = 0; k < 4; ++k) {
      auto [next, ec] = std::from_chars(p, stop, v[k]);
      if (ec != std::errc() || (k < 3 ? (next == stop || *next != ',') : next != stop))
        throw Error(ErrorCode::ConfigError,
                    fmt::format("{}:{}: expected four comma-separated numbers", path, line_no));
      p = next + 1;
    }
    out.t.push_back(v[0]);
    out.points.emplace_back(v[1], v[2], v[3]);
  }
  if (line_no == 0) throw Error(ErrorCode::ConfigError, fmt::format("{}: empty file", path));
  return out;
}

void write_curve_csv(std::ostream& out, const std::vector<double>& t, const std::vector<Point3>& points) {
  out << "t,x,y,z\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", t[i], points[i].x(), points[i].y(), points[i].z());
}

namespace {

MetricField build_metric(const RunConfig& cfg) {
  if (cfg.metric_entries) return MetricField::from_expressions(*cfg.metric_entries);
  if (cfg.metric_preset == "half_space") return MetricField::half_space();
  return MetricField::euclidean();
}

}  // namespace

Problem build_problem(const RunConfig& cfg) {
  const MetricField metric = build_metric(cfg);
  std::optional<UnitSpeedCurve> curve;
  std::optional<PrecessionFixture> precession;
  std::string label;
  const bool generated = cfg.curve == CurveKind::Precession || cfg.curve == CurveKind::Profile;
  if (generated && metric.name() != "euclidean")
    throw Error(ErrorCode::ConfigError, "generated curves are integrated in the Euclidean chart; use metric.preset = euclidean");

  switch (cfg.curve) {
    case CurveKind::None:
      throw Error(ErrorCode::ConfigError, fmt::format("{}: no curve source given", cfg.path.empty() ? "<config>" : cfg.path));
    case CurveKind::Expressions:
      curve = UnitSpeedCurve::reparametrize(
          ParamCurve::from_expressions(cfg.curve_xyz[0], cfg.curve_xyz[1], cfg.curve_xyz[2], cfg.domain_begin,
                                       cfg.domain_end, cfg.curve_param),
          metric);
      label = "expressions";
      break;
    case CurveKind::Csv:
      curve = UnitSpeedCurve::reparametrize(curve_from_samples(read_curve_csv(cfg.csv_path)), metric);
      label = "csv";
      break;
    case CurveKind::Precession: {
      PrecessionOptions opts;
      opts.steps = cfg.gen_steps;
      if (cfg.has_domain) {
        const double a = cfg.gen_mu * cfg.domain_begin, b = cfg.gen_mu * cfg.domain_end;
        opts.phase_begin = std::min(a, b);
        opts.phase_end = std::max(a, b);
      }
      precession = precession_fixture(cfg.gen_w, cfg.gen_mu, opts);
      curve = precession->fixture.curve;
      label = "generator:precession";
      break;
    }
    case CurveKind::Profile: {
      const ProfileSpec spec = profile_from_expressions(cfg.gen_kappa, cfg.gen_tau, cfg.domain_begin, cfg.domain_end,
                                                        (cfg.domain_end - cfg.domain_begin) /
                                                            static_cast<double>(cfg.gen_steps));
      FrenetIntegration integ = integrate_frenet(spec);
      if (!integ.curve) throw Error(ErrorCode::InvalidArgument, "too few integration steps");
      curve = *integ.curve;
      label = "generator:profile";
      break;
    }
  }

  std::optional<ScalarField> field;
  switch (cfg.field) {
    case FieldKind::None: break;
    case FieldKind::Expression: field = ScalarField::from_expression(cfg.field_expr); break;
    case FieldKind::Linear: field = ScalarField::linear(cfg.field_coeffs, cfg.field_offset); break;
    case FieldKind::FittedAxis: field = precession->fixture.field; break;
  }

  Tolerances tol = cfg.curve == CurveKind::Csv ? Tolerances::for_source(CurveSource::Sampled) : Tolerances{};
  if (cfg.tol_constancy) tol.constancy = *cfg.tol_constancy;
  if (cfg.tol_affine) tol.affine = *cfg.tol_affine;
  if (cfg.tol_theorem) tol.theorem = *cfg.tol_theorem;
  if (cfg.tol_zero_floor) tol.zero_floor = *cfg.tol_zero_floor;

  std::vector<double> grid = uniform_grid(*curve, cfg.grid);
  return Problem{metric, std::move(*curve), std::move(field), tol, std::move(grid), std::move(label),
                 std::move(precession)};
}

}  // namespace helixlab::cli
