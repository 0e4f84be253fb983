#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "helixlab/dual.hpp"
#include "helixlab/error.hpp"
#include "helixlab/types.hpp"

namespace helixlab {

enum class Var { X = 0, Y, Z, S, T };
inline constexpr std::size_t kVarCount = 5;

std::string_view var_name(Var v);

enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Abs, Atan2 };

struct ExprNode;

/// Variable bindings for one evaluation; unset slots are unbound.
template <class S>
using Bindings = std::array<std::optional<S>, kVarCount>;

/// Immutable expression tree. Copies share structure.
///
/// Grammar (lowest to highest precedence):
///   sum     := product (('+' | '-') product)*
///   product := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?          right-associative
///   primary := number | name | name '(' sum (',' sum)* ')' | '(' sum ')'
class Expr {
 public:
  Expr();  // the literal 0

  static Expr number(double value);
  static Expr variable(Var v);

  /// Fully parenthesized rendering; parse(to_string()) evaluates identically.
  std::string to_string() const;

  bool depends_on(Var v) const;
  bool is_constant() const;  // no variables at all

  template <class S>
  S evaluate(const Bindings<S>& env) const;

  double eval(double x, double y, double z) const;
  double eval_at(Var v, double value) const;

  const ExprNode& root() const { return *root_; }
  explicit Expr(std::shared_ptr<const ExprNode> root) : root_(std::move(root)) {}

 private:
  std::shared_ptr<const ExprNode> root_;
};

struct ParseOptions {
  /// Extra named constants (e.g. w, mu) beyond the built-in pi and e.
  std::map<std::string, double, std::less<>> constants;
};

/// Throws SyntaxError (with byte offset) or Error{UnknownIdentifier}.
Expr parse(std::string_view source, const ParseOptions& options = {});

/// Value and exact first partials with respect to x, y, z.
Dual<double, 3> eval_dual(const Expr& e, const Point3& p);

/// Value and exact first partials with respect to each listed variable, in order.
template <std::size_t N>
Dual<double, N> eval_dual(const Expr& e, const Bindings<double>& point,
                          const std::array<Var, N>& active) {
  Bindings<Dual<double, N>> env;
  for (std::size_t i = 0; i < kVarCount; ++i)
    if (point[i]) env[i] = Dual<double, N>(*point[i]);
  for (std::size_t k = 0; k < N; ++k) {
    const auto idx = static_cast<std::size_t>(active[k]);
    if (!point[idx])
      throw Error(ErrorCode::UnboundVariable, std::string(var_name(active[k])) + " is active but unbound");
    env[idx] = Dual<double, N>::variable(*point[idx], k);
  }
  return e.evaluate(env);
}

/// Value, first and second derivative of a single-variable expression.
struct Jet2 {
  double value;
  double d1;
  double d2;
};
Jet2 eval_jet2(const Expr& e, Var v, double at);

}  // namespace helixlab
