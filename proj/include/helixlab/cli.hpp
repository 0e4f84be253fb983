#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "helixlab/analysis.hpp"
#include "helixlab/expr.hpp"
#include "helixlab/generate.hpp"

namespace helixlab::cli {

inline constexpr std::string_view kToolName = "helixlab";
inline constexpr std::string_view kToolVersion = "0.1.0";

enum class CurveKind { None, Expressions, Csv, Precession, Profile };
enum class FieldKind { None, Expression, Linear, FittedAxis };

/// Parsed run configuration. Keys are flat and dotted; see docs/config.md.
struct RunConfig {
  std::string path;                           ///< source file, "" for in-memory text
  std::map<std::string, std::string> entries; ///< every key as written (echoed in reports)
  ParseOptions constants;

  std::string metric_preset = "euclidean";
  std::optional<std::array<Expr, 9>> metric_entries;

  CurveKind curve = CurveKind::None;
  std::array<Expr, 3> curve_xyz;
  Var curve_param = Var::T;
  double domain_begin = 0.0, domain_end = 0.0;
  bool has_domain = false;
  std::string csv_path;  ///< resolved against the config directory

  double gen_w = 0.0, gen_mu = 0.0;
  Expr gen_kappa, gen_tau;
  std::size_t gen_steps = 8192;

  FieldKind field = FieldKind::None;
  Expr field_expr;
  Vector3 field_coeffs = Vector3::Zero();
  double field_offset = 0.0;

  std::size_t grid = 1024;
  std::optional<double> tol_constancy, tol_affine, tol_theorem, tol_zero_floor;
  std::optional<double> verify_mu;
  bool output_samples = false;
};

/// Throws Error{ConfigError} with "path:line: message".
RunConfig parse_config(std::string_view text, const std::string& path = "");
RunConfig load_config(const std::string& path);

/// Curve, metric and (optional) field built from a config.
struct Problem {
  MetricField metric;
  UnitSpeedCurve curve;
  std::optional<ScalarField> field;
  Tolerances tolerances;
  std::vector<double> grid;
  std::string curve_label;
  std::optional<PrecessionFixture> precession;
};

Problem build_problem(const RunConfig& config);

/// Reads a "t,x,y,z" CSV. Throws IoError, ConfigError, or the curve errors.
SampledCurve read_curve_csv(const std::string& path);
void write_curve_csv(std::ostream& out, const std::vector<double>& t, const std::vector<Point3>& points);

/// Runs one command line (args excludes the program name). Returns the exit code:
/// 0 completed (and, for verify, passed), 1 a check failed, 2 an input or runtime error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace helixlab::cli
