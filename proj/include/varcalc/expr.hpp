#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace varcalc {

// Immutable expression tree over variables x0..x{n-1}.
//
// Grammar: + - * / ^, unary minus, numbers, `pi`, and the functions
// sin cos exp log sqrt abs (one argument), min max (two), pw(s, below, above)
// which selects `below` when s < 0 and `above` otherwise. With a single
// variable, `x` is accepted as an alias of `x0`.
class Expr {
 public:
  enum class Kind {
    kConst, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg,
    kSin, kCos, kExp, kLog, kSqrt, kAbs, kMin, kMax,
    kPiecewise,
    // Like kPiecewise but raises EvalError when the selector is exactly 0.
    // Produced by differentiating kinked nodes; printed as kink(s, a, b).
    kKink,
  };

  Expr() : Expr(constant(0.0)) {}
  static Expr constant(double c);
  static Expr variable(int index);
  static Expr parse(std::string_view text, int n_vars);

  Kind kind() const;
  double constant_value() const;

  // Throws EvalError on division by zero, sqrt/log of out-of-domain values,
  // and kink selectors evaluated at 0.
  double eval(std::span<const double> x) const;
  Expr derivative(int var) const;
  std::string to_string() const;
  // Largest variable index referenced, or -1.
  int max_variable() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  static Expr pow(const Expr& a, const Expr& b);
  static Expr unary(Kind k, const Expr& a);
  static Expr select(Kind k, const Expr& s, const Expr& below, const Expr& above);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Kind k, std::vector<Expr> args, double c = 0.0, int var = -1);
  std::shared_ptr<const Node> node_;
};

}  // namespace varcalc
