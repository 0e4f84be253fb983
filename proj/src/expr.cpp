#include "helixlab/expr.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <numbers>
#include <variant>
#include <vector>

#include "helixlab/error.hpp"

namespace helixlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::NonSymmetricMetric: return "NonSymmetricMetric";
    case ErrorCode::IrregularCurve: return "IrregularCurve";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NonMonotoneParameter: return "NonMonotoneParameter";
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::NotSlantHelix: return "NotSlantHelix";
    case ErrorCode::NonOrthonormalInitialFrame: return "NonOrthonormalInitialFrame";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::NonPositiveW: return "NonPositiveW";
    case ErrorCode::AxisFitFailed: return "AxisFitFailed";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::UnknownSeries: return "UnknownSeries";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view var_name(Var v) {
  static constexpr std::array<std::string_view, kVarCount> names{"x", "y", "z", "s", "t"};
  return names[static_cast<std::size_t>(v)];
}

struct NumberNode {
  double value;
};
struct VariableNode {
  Var var;
};
struct ConstantNode {
  std::string name;
  double value;
};
struct NegateNode {
  Expr operand;
};
struct BinaryNode {
  char op;  // one of + - * / ^
  Expr lhs;
  Expr rhs;
};
struct CallNode {
  Func func;
  std::vector<Expr> args;
};

struct ExprNode {
  std::variant<NumberNode, VariableNode, ConstantNode, NegateNode, BinaryNode, CallNode> data;
};

namespace {

struct FuncInfo {
  std::string_view name;
  Func func;
  std::size_t arity;
};

constexpr std::array<FuncInfo, 8> kFunctions{{
    {"sin", Func::Sin, 1},
    {"cos", Func::Cos, 1},
    {"tan", Func::Tan, 1},
    {"exp", Func::Exp, 1},
    {"log", Func::Log, 1},
    {"sqrt", Func::Sqrt, 1},
    {"abs", Func::Abs, 1},
    {"atan2", Func::Atan2, 2},
}};

const FuncInfo& info(Func f) {
  for (const auto& fi : kFunctions)
    if (fi.func == f) return fi;
  return kFunctions[0];
}

Expr make(ExprNode node) { return Expr(std::make_shared<const ExprNode>(std::move(node))); }

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

void print(const Expr& e, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, NumberNode>) {
          if (n.value < 0.0 || std::signbit(n.value))
            out += "(-" + format_number(-n.value) + ")";
          else
            out += format_number(n.value);
        } else if constexpr (std::is_same_v<N, VariableNode>) {
          out += var_name(n.var);
        } else if constexpr (std::is_same_v<N, ConstantNode>) {
          out += n.name;
        } else if constexpr (std::is_same_v<N, NegateNode>) {
          out += "(-";
          print(n.operand, out);
          out += ")";
        } else if constexpr (std::is_same_v<N, BinaryNode>) {
          out += "(";
          print(n.lhs, out);
          out += ' ';
          out += n.op;
          out += ' ';
          print(n.rhs, out);
          out += ")";
        } else {
          out += info(n.func).name;
          out += "(";
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ", ";
            print(n.args[i], out);
          }
          out += ")";
        }
      },
      e.root().data);
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::string_view src, const ParseOptions& opts) : src_(src), opts_(opts) {}

  Expr parse_all() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ < src_.size()) fail("expected operator or end of input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) const {
    std::string found = pos_ < src_.size() ? fmt::format("'{}'", src_[pos_]) : "end of input";
    throw SyntaxError(pos_, expected + ", found " + found);
  }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                  src_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (;;) {
      skip_ws();
      if (pos_ >= src_.size()) return lhs;
      const char c = src_[pos_];
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      lhs = make({BinaryNode{c, lhs, parse_product()}});
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      skip_ws();
      if (pos_ >= src_.size()) return lhs;
      const char c = src_[pos_];
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      lhs = make({BinaryNode{c, lhs, parse_unary()}});
    }
  }

  Expr parse_unary() {
    if (accept('-')) return make({NegateNode{parse_unary()}});
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) return make({BinaryNode{'^', base, parse_unary()}});
    return base;
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("expected number, name or '('");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    fail("expected number, name or '('");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    // Exponent only if followed by digits, so "2*e" and "2e" are not misread.
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        digits();
      }
    }
    double value = 0.0;
    const auto* first = src_.data() + start;
    const auto* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail("expected a numeric literal");
    }
    return Expr::number(value);
  }

  Expr parse_name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      for (const auto& fi : kFunctions) {
        if (fi.name != name) continue;
        ++pos_;
        std::vector<Expr> args;
        args.push_back(parse_sum());
        while (accept(',')) args.push_back(parse_sum());
        if (!accept(')')) fail(args.size() < fi.arity ? "expected ','" : "expected ')'");
        if (args.size() != fi.arity)
          throw SyntaxError(start, fmt::format("{} takes {} argument(s), got {}", fi.name,
                                               fi.arity, args.size()));
        return make({CallNode{fi.func, std::move(args)}});
      }
      throw Error(ErrorCode::UnknownIdentifier,
                  fmt::format("unknown function '{}' at byte {}", name, start));
    }

    for (std::size_t i = 0; i < kVarCount; ++i)
      if (var_name(static_cast<Var>(i)) == name) return Expr::variable(static_cast<Var>(i));
    if (auto it = opts_.constants.find(name); it != opts_.constants.end())
      return make({ConstantNode{std::string(name), it->second}});
    if (name == "pi") return make({ConstantNode{"pi", std::numbers::pi}});
    if (name == "e") return make({ConstantNode{"e", std::numbers::e}});
    throw Error(ErrorCode::UnknownIdentifier,
                fmt::format("unknown identifier '{}' at byte {}", name, start));
  }

  std::string_view src_;
  const ParseOptions& opts_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

[[noreturn]] void domain_error(const Expr& at, const std::string& what) {
  throw Error(ErrorCode::DomainError, what + " in " + at.to_string());
}

template <class S>
S power(const Expr& at, const S& base, const S& expo) {
  using std::exp, std::log;
  const double b = value_of(base);
  const double p = value_of(expo);
  if (!has_derivative(expo) && p == std::nearbyint(p) && std::abs(p) <= 64.0) {
    auto n = static_cast<int>(p);
    if (n == 0) return S(1.0);
    if (b == 0.0 && n < 0) domain_error(at, "division by zero");
    S result = base;
    for (int k = 1; k < std::abs(n); ++k) result = result * base;
    if (n < 0) result = S(1.0) / result;
    return result;
  }
  if (b > 0.0) return exp(expo * log(base));
  if (b == 0.0 && !has_derivative(expo) && p > 0.0) {
    // d/dx x^p at 0 is 0 for p > 1 and unbounded otherwise.
    if (p > 1.0 || !has_derivative(base)) return S(0.0) * base;
    domain_error(at, "non-differentiable power at zero");
  }
  domain_error(at, "power of a non-positive base with non-integer exponent");
}

template <class S>
S eval_node(const Expr& e, const Bindings<S>& env) {
  using std::abs, std::atan2, std::cos, std::exp, std::log, std::sin, std::sqrt, std::tan;
  S result = std::visit(
      [&](const auto& n) -> S {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, NumberNode>) {
          return S(n.value);
        } else if constexpr (std::is_same_v<N, VariableNode>) {
          const auto& slot = env[static_cast<std::size_t>(n.var)];
          if (!slot)
            throw Error(ErrorCode::UnboundVariable,
                        fmt::format("variable '{}' is not bound", var_name(n.var)));
          return *slot;
        } else if constexpr (std::is_same_v<N, ConstantNode>) {
          return S(n.value);
        } else if constexpr (std::is_same_v<N, NegateNode>) {
          return -eval_node(n.operand, env);
        } else if constexpr (std::is_same_v<N, BinaryNode>) {
          const S a = eval_node(n.lhs, env);
          const S b = eval_node(n.rhs, env);
          switch (n.op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            case '/':
              if (value_of(b) == 0.0) domain_error(e, "division by zero");
              return a / b;
            default: return power(e, a, b);
          }
        } else {
          const S a = eval_node(n.args[0], env);
          const double av = value_of(a);
          switch (n.func) {
            case Func::Sin: return sin(a);
            case Func::Cos: return cos(a);
            case Func::Tan: return tan(a);
            case Func::Exp: return exp(a);
            case Func::Log:
              if (av <= 0.0) domain_error(e, "log of a non-positive value");
              return log(a);
            case Func::Sqrt:
              if (av < 0.0) domain_error(e, "sqrt of a negative value");
              return sqrt(a);
            case Func::Abs: return abs(a);
            case Func::Atan2: {
              const S b = eval_node(n.args[1], env);
              if (av == 0.0 && value_of(b) == 0.0) domain_error(e, "atan2(0, 0)");
              return atan2(a, b);
            }
          }
          return a;
        }
      },
      e.root().data);
  if (!is_finite(result)) domain_error(e, "non-finite result");
  return result;
}

}  // namespace

Expr::Expr() : Expr(number(0.0)) {}

Expr Expr::number(double value) { return make({NumberNode{value}}); }
Expr Expr::variable(Var v) { return make({VariableNode{v}}); }

std::string Expr::to_string() const {
  std::string out;
  print(*this, out);
  return out;
}

bool Expr::depends_on(Var v) const {
  return std::visit(
      [&](const auto& n) -> bool {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, VariableNode>) {
          return n.var == v;
        } else if constexpr (std::is_same_v<N, NegateNode>) {
          return n.operand.depends_on(v);
        } else if constexpr (std::is_same_v<N, BinaryNode>) {
          return n.lhs.depends_on(v) || n.rhs.depends_on(v);
        } else if constexpr (std::is_same_v<N, CallNode>) {
          for (const auto& a : n.args)
            if (a.depends_on(v)) return true;
          return false;
        } else {
          return false;
        }
      },
      root_->data);
}

bool Expr::is_constant() const {
  for (std::size_t i = 0; i < kVarCount; ++i)
    if (depends_on(static_cast<Var>(i))) return false;
  return true;
}

template <class S>
S Expr::evaluate(const Bindings<S>& env) const {
  return eval_node(*this, env);
}

template double Expr::evaluate(const Bindings<double>&) const;
template Dual<double, 1> Expr::evaluate(const Bindings<Dual<double, 1>>&) const;
template Dual<double, 2> Expr::evaluate(const Bindings<Dual<double, 2>>&) const;
template Dual<double, 3> Expr::evaluate(const Bindings<Dual<double, 3>>&) const;
template Dual<Dual<double, 1>, 1> Expr::evaluate(const Bindings<Dual<Dual<double, 1>, 1>>&) const;

double Expr::eval(double x, double y, double z) const {
  Bindings<double> env;
  env[0] = x;
  env[1] = y;
  env[2] = z;
  return evaluate(env);
}

double Expr::eval_at(Var v, double value) const {
  Bindings<double> env;
  env[static_cast<std::size_t>(v)] = value;
  return evaluate(env);
}

Expr parse(std::string_view source, const ParseOptions& options) {
  return Parser(source, options).parse_all();
}

Dual<double, 3> eval_dual(const Expr& e, const Point3& p) {
  Bindings<double> point;
  point[0] = p.x();
  point[1] = p.y();
  point[2] = p.z();
  return eval_dual<3>(e, point, {Var::X, Var::Y, Var::Z});
}

Jet2 eval_jet2(const Expr& e, Var v, double at) {
  using D1 = Dual<double, 1>;
  using D2 = Dual<D1, 1>;
  Bindings<D2> env;
  env[static_cast<std::size_t>(v)] = D2(D1::variable(at, 0), {D1(1.0)});
  const D2 r = e.evaluate(env);
  return {r.v.v, r.d[0].v, r.d[0].d[0]};
}

}  // namespace helixlab
