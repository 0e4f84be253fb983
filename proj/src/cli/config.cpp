#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "helixlab/cli.hpp"
#include "helixlab/error.hpp"

namespace helixlab::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

// Splits on commas outside parentheses.
std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || (s[i] == ',' && depth == 0)) {
      out.emplace_back(trim(s.substr(start, i - start)));
      start = i + 1;
    } else if (s[i] == '(') {
      ++depth;
    } else if (s[i] == ')') {
      --depth;
    }
  }
  return out;
}

const std::set<std::string, std::less<>> kKeys = {
    "metric.preset", "metric.g11", "metric.g12", "metric.g13", "metric.g21", "metric.g22", "metric.g23",
    "metric.g31",    "metric.g32", "metric.g33", "curve.x",    "curve.y",    "curve.z",    "curve.domain",
    "curve.param",   "curve.csv",  "curve.generator", "generator.w", "generator.mu", "generator.kappa",
    "generator.tau", "generator.domain", "generator.length", "generator.steps", "field.f", "field.linear",
    "field.axis", "grid.count", "tol.constancy", "tol.affine", "tol.theorem", "tol.zero_floor", "verify.mu",
    "output.samples"};

class Reader {
 public:
  Reader(const RunConfig& cfg, std::map<std::string, int> lines) : cfg_(cfg), lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    const auto it = lines_.find(key);
    const std::string where =
        it == lines_.end() ? (cfg_.path.empty() ? "<config>" : cfg_.path)
                           : fmt::format("{}:{}", cfg_.path.empty() ? "<config>" : cfg_.path, it->second);
    throw Error(ErrorCode::ConfigError, fmt::format("{}: {}: {}", where, key, message));
  }

  bool has(const std::string& key) const { return cfg_.entries.count(key) > 0; }
  const std::string& raw(const std::string& key) const { return cfg_.entries.at(key); }

  Expr expr(const std::string& key, std::string_view text) const {
    try {
      return parse(text, cfg_.constants);
    } catch (const Error& e) {
      fail(key, e.what());
    }
  }
  Expr expr(const std::string& key) const { return expr(key, raw(key)); }

  double number(const std::string& key, std::string_view text) const {
    const Expr e = expr(key, text);
    if (!e.is_constant()) fail(key, fmt::format("'{}' must not depend on x, y, z, s or t", text));
    try {
      return e.eval(0.0, 0.0, 0.0);
    } catch (const Error& err) {
      fail(key, err.what());
    }
  }
  double number(const std::string& key) const { return number(key, raw(key)); }

  std::size_t count(const std::string& key) const {
    const double v = number(key);
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) fail(key, "must be a positive integer");
    return static_cast<std::size_t>(v);
  }

  std::vector<double> numbers(const std::string& key, std::size_t n_min, std::size_t n_max) const {
    const auto parts = split_list(raw(key));
    if (parts.size() < n_min || parts.size() > n_max)
      fail(key, n_min == n_max ? fmt::format("expected {} comma-separated values", n_min)
                               : fmt::format("expected {} to {} comma-separated values", n_min, n_max));
    std::vector<double> out;
    for (const auto& p : parts) out.push_back(number(key, p));
    return out;
  }

  bool boolean(const std::string& key) const {
    const std::string& v = raw(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(key, "expected true or false");
  }

 private:
  const RunConfig& cfg_;
  std::map<std::string, int> lines_;
};

}  // namespace

RunConfig parse_config(std::string_view text, const std::string& path) {
  RunConfig cfg;
  cfg.path = path;
  const std::string where = path.empty() ? "<config>" : path;
  std::map<std::string, int> lines;
  std::vector<std::pair<std::string, std::string>> constants;

  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']' || !is_identifier(trim(line.substr(1, line.size() - 2))))
        throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: malformed section header", where, line_no));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: expected 'key = value'", where, line_no));
    std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!section.empty()) key = section + "." + key;
    if (value.empty()) throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: {}: empty value", where, line_no, key));
    const bool is_const = key.rfind("const.", 0) == 0;
    if (is_const ? !is_identifier(std::string_view(key).substr(6)) : kKeys.count(key) == 0)
      throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: unknown key '{}'", where, line_no, key));
    if (cfg.entries.count(key))
      throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: duplicate key '{}'", where, line_no, key));
    cfg.entries[key] = value;
    lines[key] = line_no;
    if (is_const) constants.emplace_back(key, value);
    if (end == text.size()) break;
  }

  Reader r(cfg, lines);
  // Constants in file order; each may use the ones before it.
  for (const auto& [key, value] : constants) {
    const std::string name = key.substr(6);
    if (name == "pi" || name == "e" || (name.size() == 1 && std::string_view("xyzst").find(name[0]) != std::string_view::npos))
      r.fail(key, "reserved name");
    cfg.constants.constants[name] = r.number(key, value);
  }

  // metric
  const bool any_g = std::any_of(cfg.entries.begin(), cfg.entries.end(),
                                 [](const auto& kv) { return kv.first.rfind("metric.g", 0) == 0; });
  if (any_g) {
    if (r.has("metric.preset")) r.fail("metric.preset", "give either a preset or explicit g entries");
    std::array<Expr, 9> g;
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j) {
        const std::string key = fmt::format("metric.g{}{}", i, j);
        const std::string mirror = fmt::format("metric.g{}{}", j, i);
        if (r.has(key)) g[(i - 1) * 3 + (j - 1)] = r.expr(key);
        else if (r.has(mirror)) g[(i - 1) * 3 + (j - 1)] = r.expr(mirror);
        else r.fail(key, "missing metric entry");
      }
    cfg.metric_entries = g;
    cfg.metric_preset.clear();
  } else if (r.has("metric.preset")) {
    cfg.metric_preset = r.raw("metric.preset");
    if (cfg.metric_preset != "euclidean" && cfg.metric_preset != "half_space")
      r.fail("metric.preset", "expected euclidean or half_space");
  }

  // curve: exactly one source
  const bool has_xyz = r.has("curve.x") || r.has("curve.y") || r.has("curve.z");
  const int sources = int(has_xyz) + int(r.has("curve.csv")) + int(r.has("curve.generator"));
  if (sources > 1) throw Error(ErrorCode::ConfigError, fmt::format("{}: more than one curve source given", where));
  if (has_xyz) {
    cfg.curve = CurveKind::Expressions;
    for (const char* c : {"curve.x", "curve.y", "curve.z"})
      if (!r.has(c)) r.fail(c, "missing curve component");
    if (r.has("curve.param")) {
      const std::string& p = r.raw("curve.param");
      if (p == "t") cfg.curve_param = Var::T;
      else if (p == "s") cfg.curve_param = Var::S;
      else r.fail("curve.param", "expected t or s");
    }
    for (int k = 0; k < 3; ++k) {
      const std::string key = std::string("curve.") + "xyz"[k];
      cfg.curve_xyz[k] = r.expr(key);
      for (Var v : {Var::X, Var::Y, Var::Z, cfg.curve_param == Var::T ? Var::S : Var::T})
        if (cfg.curve_xyz[k].depends_on(v))
          r.fail(key, fmt::format("may only depend on {}", var_name(cfg.curve_param)));
    }
    if (!r.has("curve.domain")) r.fail("curve.domain", "missing curve domain");
    const auto d = r.numbers("curve.domain", 2, 2);
    cfg.domain_begin = d[0];
    cfg.domain_end = d[1];
    cfg.has_domain = true;
    if (!(d[1] > d[0])) r.fail("curve.domain", "domain end must exceed its start");
  } else if (r.has("curve.csv")) {
    cfg.curve = CurveKind::Csv;
    std::filesystem::path p(r.raw("curve.csv"));
    if (p.is_relative() && !path.empty()) p = std::filesystem::path(path).parent_path() / p;
    cfg.csv_path = p.string();
  } else if (r.has("curve.generator")) {
    const std::string& kind = r.raw("curve.generator");
    if (kind == "precession") {
      cfg.curve = CurveKind::Precession;
      for (const char* k : {"generator.w", "generator.mu"})
        if (!r.has(k)) r.fail(k, "required for the precession generator");
      cfg.gen_w = r.number("generator.w");
      cfg.gen_mu = r.number("generator.mu");
    } else if (kind == "profile") {
      cfg.curve = CurveKind::Profile;
      for (const char* k : {"generator.kappa", "generator.tau"}) {
        if (!r.has(k)) r.fail(k, "required for the profile generator");
        const Expr e = r.expr(k);
        for (Var v : {Var::X, Var::Y, Var::Z, Var::T})
          if (e.depends_on(v)) r.fail(k, "may only depend on s");
      }
      cfg.gen_kappa = r.expr("generator.kappa");
      cfg.gen_tau = r.expr("generator.tau");
    } else {
      r.fail("curve.generator", "expected precession or profile");
    }
    if (r.has("generator.domain") && r.has("generator.length"))
      r.fail("generator.length", "give either generator.domain or generator.length");
    if (r.has("generator.domain")) {
      const auto d = r.numbers("generator.domain", 2, 2);
      cfg.domain_begin = d[0];
      cfg.domain_end = d[1];
      cfg.has_domain = true;
    } else if (r.has("generator.length")) {
      cfg.domain_begin = 0.0;
      cfg.domain_end = r.number("generator.length");
      cfg.has_domain = true;
    }
    if (cfg.has_domain && !(cfg.domain_end > cfg.domain_begin))
      r.fail(r.has("generator.domain") ? "generator.domain" : "generator.length", "domain must have positive length");
    if (cfg.curve == CurveKind::Profile && !cfg.has_domain)
      r.fail("generator.domain", "the profile generator needs generator.domain or generator.length");
    if (r.has("generator.steps")) cfg.gen_steps = r.count("generator.steps");
  }
  for (const auto& [key, value] : cfg.entries) {
    const bool generator_key = key.rfind("generator.", 0) == 0;
    if (generator_key && cfg.curve != CurveKind::Precession && cfg.curve != CurveKind::Profile)
      r.fail(key, "generator keys need curve.generator");
    if ((key == "curve.domain" || key == "curve.param") && cfg.curve != CurveKind::Expressions)
      r.fail(key, "only valid with curve.x/y/z");
  }
  if (cfg.curve == CurveKind::Precession) {
    for (const char* k : {"generator.kappa", "generator.tau"})
      if (r.has(k)) r.fail(k, "not used by the precession generator");
  } else if (cfg.curve == CurveKind::Profile) {
    for (const char* k : {"generator.w", "generator.mu"})
      if (r.has(k)) r.fail(k, "not used by the profile generator");
  }

  // field
  const int fields = int(r.has("field.f")) + int(r.has("field.linear")) + int(r.has("field.axis"));
  if (fields > 1) throw Error(ErrorCode::ConfigError, fmt::format("{}: more than one field given", where));
  if (r.has("field.f")) {
    cfg.field = FieldKind::Expression;
    cfg.field_expr = r.expr("field.f");
    for (Var v : {Var::S, Var::T})
      if (cfg.field_expr.depends_on(v)) r.fail("field.f", "may only depend on x, y, z");
  } else if (r.has("field.linear")) {
    cfg.field = FieldKind::Linear;
    const auto c = r.numbers("field.linear", 3, 4);
    cfg.field_coeffs = Vector3(c[0], c[1], c[2]);
    cfg.field_offset = c.size() == 4 ? c[3] : 0.0;
  } else if (r.has("field.axis")) {
    if (r.raw("field.axis") != "fitted") r.fail("field.axis", "the only supported value is 'fitted'");
    if (cfg.curve != CurveKind::Precession) r.fail("field.axis", "needs curve.generator = precession");
    cfg.field = FieldKind::FittedAxis;
  }

  if (r.has("grid.count")) {
    cfg.grid = r.count("grid.count");
    if (cfg.grid < 32) r.fail("grid.count", "must be at least 32");
  }
  auto positive = [&](const char* key, std::optional<double>& slot) {
    if (!r.has(key)) return;
    slot = r.number(key);
    if (!(*slot > 0.0)) r.fail(key, "must be positive");
  };
  positive("tol.constancy", cfg.tol_constancy);
  positive("tol.affine", cfg.tol_affine);
  positive("tol.theorem", cfg.tol_theorem);
  positive("tol.zero_floor", cfg.tol_zero_floor);
  if (r.has("verify.mu")) cfg.verify_mu = r.number("verify.mu");
  if (r.has("output.samples")) cfg.output_samples = r.boolean("output.samples");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot read config '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace helixlab::cli
