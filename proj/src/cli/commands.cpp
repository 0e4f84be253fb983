#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "helixlab/cli.hpp"
#include "helixlab/error.hpp"
#include "json_writer.hpp"

namespace helixlab::cli {

namespace {

// ---------------------------------------------------------------------------
// JSON fragments

Json vec(const Vector3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json constancy(const ConstancyResult& c) {
  return Json{{"is_constant", c.is_constant},
              {"mean", c.mean},
              {"max_abs_deviation", c.max_abs_deviation},
              {"scale", c.scale},
              {"tolerance", c.tolerance}};
}

Json range_stats(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  return Json{{"min", *lo}, {"max", *hi}, {"mean", mean}};
}

Json tolerances(const Tolerances& t) {
  return Json{{"constancy", t.constancy}, {"affine", t.affine}, {"theorem", t.theorem}, {"zero_floor", t.zero_floor}};
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json helix(const HelixVerdict& h) {
  return Json{{"verdict", h.verdict}, {"eikonal", h.eikonal}, {"nonzero", h.nonzero}, {"value", constancy(h.value)}};
}

Json precession(const PrecessionResult& p) {
  return Json{{"verdict", p.verdict},
              {"w", p.w},
              {"mu", p.mu},
              {"phase_offset", p.phase_offset},
              {"max_phase_residual", p.max_phase_residual},
              {"phase_affine", p.phase_affine},
              {"general_helix", p.general_helix},
              {"kappa2_tau2", constancy(p.radius2)}};
}

Json axis(const AxisField& a) {
  return Json{{"n", a.n},
              {"cos_theta", a.cos_theta},
              {"max_deviation_from_gradient", a.max_deviation},
              {"ambient_deviation", optional_number(a.ambient_deviation)},
              {"mean_axis", vec(a.mean_axis)}};
}

Json header(std::string_view command, const RunConfig& cfg) {
  Json entries = Json::object();
  for (const auto& [k, v] : cfg.entries) entries[k] = v;
  return Json{{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
              {"command", command},
              {"config", {{"path", cfg.path}, {"entries", entries}}}};
}

Json input(const Problem& p) {
  return Json{{"metric", p.metric.name()},
              {"curve", {{"source", p.curve_label}, {"length", p.curve.length()}, {"knots", p.curve.knot_count()}}},
              {"field", p.field ? Json(p.field->description()) : Json(nullptr)},
              {"grid", p.grid.size()}};
}

// ---------------------------------------------------------------------------
// Measurements

const ScalarField& require_field(const Problem& p, std::string_view what) {
  if (!p.field) throw Error(ErrorCode::ConfigError, fmt::format("{} needs a scalar field (field.f, field.linear or field.axis)", what));
  return *p.field;
}

struct Measured {
  std::vector<FrenetSample> frames;
  CurvatureProfile profile;
  std::vector<double> invariant;
  std::optional<AlongCurve> along;
};

Measured measure(const Problem& p) {
  Measured m;
  if (p.field) {
    m.along = measure_along(*p.field, p.curve, p.metric, p.grid);
    for (const auto& s : m.along->samples) m.frames.push_back(s.frame);
    m.profile = m.along->profile;
    m.invariant = m.along->slant_invariant;
  } else {
    m.frames = frenet_series(p.curve, p.metric, p.grid);
    m.profile = measure_profile(m.frames);
    m.invariant = slant_invariant_series(m.profile);
  }
  return m;
}

std::vector<double> kappa2_tau2(const CurvatureProfile& prof) {
  std::vector<double> out(prof.size());
  for (std::size_t i = 0; i < prof.size(); ++i) out[i] = prof.kappa[i] * prof.kappa[i] + prof.tau[i] * prof.tau[i];
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", path));
  f << text;
  if (!f) throw Error(ErrorCode::IoError, fmt::format("failed writing '{}'", path));
}

void emit(const std::string& out_path, std::ostream& out, const std::string& text) {
  if (out_path.empty()) out << text;
  else write_text(out_path, text);
}

// ---------------------------------------------------------------------------
// Commands

struct Common {
  std::string config;
  std::string out;
  std::optional<std::size_t> grid;
  std::optional<double> tol;
};

RunConfig load(const Common& c) {
  if (c.config.empty()) throw Error(ErrorCode::ConfigError, "--config is required");
  RunConfig cfg = load_config(c.config);
  if (c.grid) {
    if (*c.grid < 32) throw Error(ErrorCode::ConfigError, "--grid must be at least 32");
    cfg.grid = *c.grid;
    cfg.entries["grid.count"] = std::to_string(*c.grid);
  }
  if (c.tol) {
    if (!(*c.tol > 0.0)) throw Error(ErrorCode::ConfigError, "--tol must be positive");
    cfg.tol_constancy = *c.tol;
    cfg.entries["tol.constancy"] = fmt::format("{:.17g}", *c.tol);
  }
  return cfg;
}

int cmd_analyze(const Common& c, std::ostream& out) {
  const RunConfig cfg = load(c);
  const Problem p = build_problem(cfg);
  const Measured m = measure(p);
  const auto k2t2 = kappa2_tau2(m.profile);

  Json report = header("analyze", cfg);
  report["input"] = input(p);
  report["tolerances"] = tolerances(p.tolerances);
  Json frenet{{"kappa", range_stats(m.profile.kappa)},
              {"tau", range_stats(m.profile.tau)},
              {"kappa2_tau2", constancy(check_constancy(k2t2, p.tolerances.constancy))},
              {"slant_invariant", constancy(check_constancy(m.invariant, p.tolerances.theorem))}};
  report["frenet"] = frenet;
  if (m.along) {
    const auto& a = *m.along;
    report["field"] = Json{
        {"grad_norm", constancy(check_constancy(a.column(&AlongSample::grad_norm), p.tolerances.constancy))},
        {"cos_theta", constancy(check_constancy(a.column(&AlongSample::cos_theta), p.tolerances.constancy))},
        {"darboux_n", constancy(check_constancy(a.column(&AlongSample::darboux_n), p.tolerances.constancy))},
        {"darboux_w", constancy(check_constancy(a.column(&AlongSample::darboux_w), p.tolerances.constancy))}};
  }
  if (cfg.output_samples) {
    Json s{{"s", m.profile.s}, {"kappa", m.profile.kappa}, {"tau", m.profile.tau}, {"kappa2_tau2", k2t2},
           {"slant_invariant", m.invariant}};
    report["samples"] = s;
  }

  if (!c.out.empty()) {
    std::ostringstream csv;
    csv << "s,x,y,z,Tx,Ty,Tz,Nx,Ny,Nz,Bx,By,Bz,kappa,tau,Wx,Wy,Wz,W0x,W0y,W0z,kappa2_tau2,slant_invariant\n";
    for (std::size_t i = 0; i < m.frames.size(); ++i) {
      const auto& f = m.frames[i];
      csv << fmt::format("{:.17g}", f.s);
      for (const Vector3* v : {&f.position, &f.T, &f.N, &f.B})
        csv << fmt::format(",{:.17g},{:.17g},{:.17g}", v->x(), v->y(), v->z());
      csv << fmt::format(",{:.17g},{:.17g}", f.kappa, f.tau);
      for (const Vector3* v : {&f.W, &f.W0}) csv << fmt::format(",{:.17g},{:.17g},{:.17g}", v->x(), v->y(), v->z());
      csv << fmt::format(",{:.17g},{:.17g}\n", k2t2[i], m.invariant[i]);
    }
    write_text(c.out, csv.str());
    report["series_file"] = c.out;
  }
  out << dump(report);
  return 0;
}

Json classification(const ClassificationReport& r) {
  Json v{{"eikonal_along",
          {{"verdict", r.eikonal.verdict()}, {"zero_gradient", r.eikonal.zero_gradient}, {"grad_norm", constancy(r.eikonal.norm)}}},
         {"affine_along",
          {{"verdict", r.affine.affine},
           {"max_residual", r.affine.max_residual},
           {"max_hessian_norm", r.affine.max_hessian_norm},
           {"tolerance", r.affine.tolerance}}},
         {"slant_helix", helix(r.slant)},
         {"darboux_helix", helix(r.darboux)},
         {"non_normed_darboux", helix(r.non_normed)},
         {"constant_precession", precession(r.precession)}};
  return v;
}

int cmd_classify(const Common& c, std::ostream& out) {
  const RunConfig cfg = load(c);
  const Problem p = build_problem(cfg);
  const AlongCurve data = measure_along(require_field(p, "classify"), p.curve, p.metric, p.grid);
  const ClassificationReport r = classify(data, p.tolerances);

  Json report = header("classify", cfg);
  report["input"] = input(p);
  report["tolerances"] = tolerances(p.tolerances);
  report["verdicts"] = classification(r);
  report["measured"] = Json{{"grad_norm", r.eikonal.norm.mean},
                            {"cos_theta", r.slant.value.mean},
                            {"n", r.darboux.value.mean},
                            {"g_grad_w", r.non_normed.value.mean},
                            {"kappa2_tau2", r.precession.radius2.mean}};
  report["axis"] = r.axis ? axis(*r.axis) : Json(nullptr);
  report["notes"] = r.notes;
  if (cfg.output_samples) {
    report["samples"] = Json{{"s", data.grid},
                             {"kappa", data.profile.kappa},
                             {"tau", data.profile.tau},
                             {"grad_norm", data.column(&AlongSample::grad_norm)},
                             {"cos_theta", data.column(&AlongSample::cos_theta)},
                             {"darboux_n", data.column(&AlongSample::darboux_n)},
                             {"darboux_w", data.column(&AlongSample::darboux_w)},
                             {"affine_residual", data.column(&AlongSample::affine_residual)}};
  }
  emit(c.out, out, dump(report));
  return 0;
}

const std::vector<std::string> kChecks = {"thm2.1", "cor2.2", "thm2.2", "thm2.3", "cor2.1-2.4"};

bool acceptable(CheckStatus s) { return s != CheckStatus::Fail; }

int cmd_verify(const Common& c, const std::string& which, std::ostream& out) {
  std::vector<std::string> selected;
  std::stringstream ss(which);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item == "all") {
      selected = kChecks;
      break;
    }
    if (std::find(kChecks.begin(), kChecks.end(), item) == kChecks.end())
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("unknown check '{}' (expected all, {})", item, fmt::join(kChecks, ", ")));
    if (std::find(selected.begin(), selected.end(), item) == selected.end()) selected.push_back(item);
  }
  if (selected.empty()) throw Error(ErrorCode::InvalidArgument, "--which selects no checks");
  // Canonical order regardless of how the list was written.
  std::sort(selected.begin(), selected.end(), [](const std::string& a, const std::string& b) {
    return std::find(kChecks.begin(), kChecks.end(), a) < std::find(kChecks.begin(), kChecks.end(), b);
  });

  const RunConfig cfg = load(c);
  const Problem p = build_problem(cfg);
  const AlongCurve data = measure_along(require_field(p, "verify"), p.curve, p.metric, p.grid);
  const Tolerances& tol = p.tolerances;

  Json checks = Json::object();
  bool ok = true;
  for (const auto& name : selected) {
    CheckStatus status = CheckStatus::Fail;
    Json j;
    if (name == "thm2.1") {
      const auto r = verify_theorem_2_1(data, tol);
      status = r.status;
      j = Json{{"affine", r.affine}, {"eikonal", r.eikonal}, {"slant", r.slant}, {"slant_invariant", constancy(r.invariant)},
               {"axis_deviation", optional_number(r.axis_deviation)},
               {"ambient_deviation", optional_number(r.ambient_deviation)}};
    } else if (name == "cor2.2") {
      const auto slant = classify_slant_helix(data, tol);
      const auto darb = classify_darboux_helix(data, tol);
      const bool affine = is_affine_along(data, tol).affine;
      const double mu = cfg.verify_mu.value_or(slant.value.mean);
      const auto r = verify_corollary_2_2(data.profile, darb.value.mean, mu, tol.theorem);
      status = !slant.verdict ? CheckStatus::NotApplicable
               : !affine      ? CheckStatus::HypothesisNotMet
               : r.pass       ? CheckStatus::Pass
                              : CheckStatus::Fail;
      j = Json{{"affine", affine}, {"slant", slant.verdict}, {"n", r.n}, {"mu", r.mu},
               {"mu_source", cfg.verify_mu ? "config" : "measured cos_theta"},
               {"max_residual_tangent", r.max_residual_tangent},
               {"max_residual_binormal", r.max_residual_binormal}, {"tolerance", r.tolerance}};
    } else if (name == "thm2.2") {
      const auto r = verify_theorem_2_2(data, tol);
      status = r.status;
      j = Json{{"affine", r.affine}, {"slant", r.slant}, {"darboux", r.darboux},
               {"implication_holds", r.implication_holds}, {"n", r.n}, {"cos_theta", r.cos_theta},
               {"decomposition_residual", r.decomposition_residual}};
    } else if (name == "thm2.3") {
      const auto r = verify_theorem_2_3(data, tol);
      status = r.status;
      j = Json{{"affine", r.affine}, {"non_normed", r.non_normed}, {"slant", r.slant},
               {"kappa2_tau2", constancy(r.kappa2_tau2)}, {"agree", r.agree},
               {"a2_relation_residual", r.a2_relation_residual}, {"a2_relation_points", r.a2_relation_points}};
    } else {
      const auto r = verify_corollaries_2_3_2_4(data, tol);
      status = r.status;
      j = Json{{"affine", r.affine}, {"non_normed", r.non_normed}, {"slant", r.slant}, {"darboux", r.darboux},
               {"precession", r.precession}, {"kappa2_tau2_constant", r.kappa2_tau2_constant},
               {"nonnormed_and_constant_iff_darboux", r.cor_2_1},
               {"slant_iff_precession", r.cor_2_3}, {"slant_iff_darboux", r.cor_2_4}};
    }
    Json entry{{"status", to_string(status)}};
    entry.update(j);
    checks[name] = entry;
    ok = ok && acceptable(status);
  }

  Json report = header("verify", cfg);
  report["input"] = input(p);
  report["tolerances"] = tolerances(tol);
  report["which"] = selected;
  report["checks"] = checks;
  report["passed"] = ok;
  report["notes"] = classify(data, tol).notes;
  emit(c.out, out, dump(report));
  return ok ? 0 : 1;
}

const std::vector<std::string> kSeries = {"kappa",     "tau",         "grad_norm",       "cos_theta",
                                          "darboux_n", "darboux_w",   "kappa2_tau2",     "slant_invariant",
                                          "affine_residual", "hessian_norm"};

int cmd_plot(const Common& c, const std::string& series, std::ostream& out) {
  if (std::find(kSeries.begin(), kSeries.end(), series) == kSeries.end())
    throw Error(ErrorCode::UnknownSeries,
                fmt::format("unknown series '{}'; available: {}", series, fmt::join(kSeries, ", ")));
  const RunConfig cfg = load(c);
  const Problem p = build_problem(cfg);
  std::vector<double> s, values;
  if (series == "kappa" || series == "tau" || series == "kappa2_tau2" || series == "slant_invariant") {
    const Measured m = measure(p);
    s = m.profile.s;
    if (series == "kappa") values = m.profile.kappa;
    else if (series == "tau") values = m.profile.tau;
    else if (series == "kappa2_tau2") values = kappa2_tau2(m.profile);
    else values = m.invariant;
  } else {
    const AlongCurve a = measure_along(require_field(p, fmt::format("series '{}'", series)), p.curve, p.metric, p.grid);
    s = a.grid;
    double AlongSample::*member = series == "grad_norm"         ? &AlongSample::grad_norm
                                  : series == "cos_theta"       ? &AlongSample::cos_theta
                                  : series == "darboux_n"       ? &AlongSample::darboux_n
                                  : series == "darboux_w"       ? &AlongSample::darboux_w
                                  : series == "affine_residual" ? &AlongSample::affine_residual
                                                                : &AlongSample::hessian_norm;
    values = a.column(member);
  }
  std::string text = "s,value\n";
  for (std::size_t i = 0; i < s.size(); ++i) text += fmt::format("{:.17g},{:.17g}\n", s[i], values[i]);
  emit(c.out, out, text);
  return 0;
}

struct GenerateFlags {
  std::optional<double> w, mu, length;
  std::string kappa, tau;
  std::optional<std::size_t> steps;
};

int cmd_generate(const Common& c, const GenerateFlags& g, std::ostream& out) {
  const bool any_flag = g.w || g.mu || g.length || !g.kappa.empty() || !g.tau.empty() || g.steps;
  RunConfig cfg;
  if (!c.config.empty()) {
    if (any_flag) throw Error(ErrorCode::ConfigError, "give generator settings either in --config or as flags");
    cfg = load_config(c.config);
  } else {
    std::string text;
    const bool precession = g.w || g.mu;
    const bool profile = !g.kappa.empty() || !g.tau.empty();
    if (precession == profile)
      throw Error(ErrorCode::ConfigError, "generate needs either --w/--mu or --kappa/--tau");
    if (precession) {
      if (!g.w || !g.mu) throw Error(ErrorCode::ConfigError, "the precession generator needs both --w and --mu");
      text += fmt::format("curve.generator = precession\ngenerator.w = {:.17g}\ngenerator.mu = {:.17g}\n", *g.w, *g.mu);
    } else {
      if (g.kappa.empty() || g.tau.empty())
        throw Error(ErrorCode::ConfigError, "the profile generator needs both --kappa and --tau");
      text += fmt::format("curve.generator = profile\ngenerator.kappa = {}\ngenerator.tau = {}\n", g.kappa, g.tau);
    }
    if (g.length) text += fmt::format("generator.length = {:.17g}\n", *g.length);
    if (g.steps) text += fmt::format("generator.steps = {}\n", *g.steps);
    cfg = parse_config(text, "<flags>");
  }
  if (cfg.curve != CurveKind::Precession && cfg.curve != CurveKind::Profile)
    throw Error(ErrorCode::ConfigError, "generate needs curve.generator = precession or profile");
  if (cfg.curve == CurveKind::Precession) {
    if (!(cfg.gen_w > 0.0)) throw Error(ErrorCode::NonPositiveW, fmt::format("w = {:.17g} must be > 0", cfg.gen_w));
  }
  if (!cfg.has_domain) throw Error(ErrorCode::ConfigError, "generate needs generator.length or generator.domain");
  if (c.out.empty()) throw Error(ErrorCode::ConfigError, "generate needs --out for the curve CSV");

  const double step = (cfg.domain_end - cfg.domain_begin) / static_cast<double>(cfg.gen_steps);
  const ProfileSpec spec = cfg.curve == CurveKind::Precession
                               ? constant_precession_profile(cfg.gen_w, cfg.gen_mu, cfg.domain_begin, cfg.domain_end, step)
                               : profile_from_expressions(cfg.gen_kappa, cfg.gen_tau, cfg.domain_begin, cfg.domain_end, step);
  const FrenetIntegration integ = integrate_frenet(spec);

  std::vector<Point3> points;
  for (const auto& f : integ.frames) points.push_back(f.position);
  std::ostringstream csv;
  write_curve_csv(csv, integ.s, points);
  write_text(c.out, csv.str());

  // Round trip: measured invariants of the emitted curve against the prescription.
  double max_k = 0.0, max_t = 0.0;
  std::size_t compared = 0;
  if (integ.curve) {
    const auto grid = uniform_grid(*integ.curve, 1024);
    const MetricField euclid = MetricField::euclidean();
    for (double s : grid) {
      const double prescribed_k = spec.kappa(spec.s_begin + s);
      if (std::abs(prescribed_k) <= 1e-3) continue;
      const FrenetSample f = frenet_apparatus(*integ.curve, euclid, s);
      max_k = std::max(max_k, std::abs(f.kappa - std::abs(prescribed_k)));
      max_t = std::max(max_t, std::abs(f.tau - spec.tau(spec.s_begin + s)));
      ++compared;
    }
  }
  const PrecessionResult fit = check_constant_precession(tabulate(spec, 4096), 1e-6);

  Json cert = header("generate", cfg);
  cert["generator"] = Json{{"profile", spec.description},
                           {"s_begin", spec.s_begin},
                           {"s_end", spec.s_end},
                           {"steps", integ.s.size() - 1},
                           {"step", (spec.s_end - spec.s_begin) / static_cast<double>(integ.s.size() - 1)}};
  cert["fit"] = precession(fit);
  cert["integration"] = Json{{"max_frame_drift", integ.max_drift},
                             {"max_orthonormal_error", integ.max_orthonormal_error},
                             {"closure_error", (integ.frames.back().position - integ.frames.front().position).norm()}};
  cert["roundtrip"] = Json{{"points_compared", compared}, {"max_kappa_error", max_k}, {"max_tau_error", max_t}};
  cert["csv"] = c.out;

  const std::filesystem::path out_path(c.out);
  const std::string cert_path = (out_path.parent_path() / (out_path.stem().string() + ".cert.json")).string();
  cert["certificate"] = cert_path;
  const std::string text = dump(cert);
  write_text(cert_path, text);
  out << text;
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curve/field helix analysis on 3-manifolds", std::string(kToolName)};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Run configuration file");
    sub->add_option("--out", common.out, "Output file");
    sub->add_option("--grid", common.grid, "Grid point count (overrides grid.count)");
    sub->add_option("--tol", common.tol, "Constancy tolerance (overrides tol.constancy)");
  };
  auto* analyze = app.add_subcommand("analyze", "Frenet apparatus along the curve");
  auto* classify_cmd = app.add_subcommand("classify", "Run every classifier");
  auto* verify = app.add_subcommand("verify", "Check the helix theorems numerically");
  auto* generate = app.add_subcommand("generate", "Integrate a curve from curvature and torsion");
  auto* plot = app.add_subcommand("plot", "Emit one series as s,value CSV");
  for (auto* sub : {analyze, classify_cmd, verify, generate, plot}) add_common(sub);

  std::string which = "all";
  verify->add_option("--which", which, "Comma list of thm2.1, cor2.2, thm2.2, thm2.3, cor2.1-2.4, all");
  std::string series;
  plot->add_option("--series", series, "Series name")->required();
  GenerateFlags gen;
  generate->add_option("--w", gen.w, "Precession w");
  generate->add_option("--mu", gen.mu, "Precession mu");
  generate->add_option("--kappa", gen.kappa, "Curvature expression in s");
  generate->add_option("--tau", gen.tau, "Torsion expression in s");
  generate->add_option("--length", gen.length, "Arc length of the domain [0, L]");
  generate->add_option("--steps", gen.steps, "Integration steps");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, eo;
    const int code = app.exit(e, o, eo);
    out << o.str();
    err << eo.str();
    return code == 0 ? 0 : 2;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(common, out);
    if (classify_cmd->parsed()) return cmd_classify(common, out);
    if (verify->parsed()) return cmd_verify(common, which, out);
    if (plot->parsed()) return cmd_plot(common, series, out);
    return cmd_generate(common, gen, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 2;
}

}  // namespace helixlab::cli
