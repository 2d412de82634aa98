#include "varcalc/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "varcalc/common.hpp"

namespace varcalc {

struct Expr::Node {
  Kind kind;
  double c = 0.0;
  int var = -1;
  std::vector<Expr> args;
};

Expr Expr::make(Kind k, std::vector<Expr> args, double c, int var) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->c = c;
  n->var = var;
  n->args = std::move(args);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::constant(double c) { return make(Kind::kConst, {}, c); }
Expr Expr::variable(int index) {
  if (index < 0) throw DimensionError("Expr: negative variable index");
  return make(Kind::kVar, {}, 0.0, index);
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->c; }

namespace {
bool is_const(const Expr& e, double v) {
  return e.kind() == Expr::Kind::kConst && e.constant_value() == v;
}
bool is_const(const Expr& e) { return e.kind() == Expr::Kind::kConst; }
}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (is_const(a) && is_const(b)) return Expr::constant(a.constant_value() + b.constant_value());
  return Expr::make(Expr::Kind::kAdd, {a, b});
}
Expr operator-(const Expr& a, const Expr& b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return -b;
  if (is_const(a) && is_const(b)) return Expr::constant(a.constant_value() - b.constant_value());
  return Expr::make(Expr::Kind::kSub, {a, b});
}
Expr operator*(const Expr& a, const Expr& b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr::constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b)) return Expr::constant(a.constant_value() * b.constant_value());
  return Expr::make(Expr::Kind::kMul, {a, b});
}
Expr operator/(const Expr& a, const Expr& b) {
  if (is_const(b, 1.0)) return a;
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return Expr::constant(0.0);
  return Expr::make(Expr::Kind::kDiv, {a, b});
}
Expr operator-(const Expr& a) {
  if (is_const(a)) return Expr::constant(-a.constant_value());
  if (a.kind() == Expr::Kind::kNeg) return a.node_->args[0];
  return Expr::make(Expr::Kind::kNeg, {a});
}
Expr Expr::pow(const Expr& a, const Expr& b) {
  if (is_const(b, 1.0)) return a;
  if (is_const(b, 0.0)) return constant(1.0);
  return make(Kind::kPow, {a, b});
}
Expr Expr::unary(Kind k, const Expr& a) { return make(k, {a}); }
Expr Expr::select(Kind k, const Expr& s, const Expr& below, const Expr& above) {
  if (k == Kind::kMin || k == Kind::kMax) return make(k, {below, above});
  return make(k, {s, below, above});
}

double Expr::eval(std::span<const double> x) const {
  const Node& n = *node_;
  auto arg = [&](int i) { return n.args[static_cast<size_t>(i)].eval(x); };
  switch (n.kind) {
    case Kind::kConst:
      return n.c;
    case Kind::kVar:
      if (static_cast<size_t>(n.var) >= x.size()) {
        throw DimensionError("Expr: variable x" + std::to_string(n.var) + " out of range");
      }
      return x[static_cast<size_t>(n.var)];
    case Kind::kAdd: return arg(0) + arg(1);
    case Kind::kSub: return arg(0) - arg(1);
    case Kind::kMul: return arg(0) * arg(1);
    case Kind::kDiv: {
      double d = arg(1);
      if (d == 0.0) throw EvalError("division by zero");
      return arg(0) / d;
    }
    case Kind::kPow: {
      double a = arg(0), b = arg(1);
      if (a == 0.0 && b < 0.0) throw EvalError("division by zero in power");
      if (a < 0.0 && b != std::floor(b)) throw EvalError("negative base with fractional exponent");
      return std::pow(a, b);
    }
    case Kind::kNeg: return -arg(0);
    case Kind::kSin: return std::sin(arg(0));
    case Kind::kCos: return std::cos(arg(0));
    case Kind::kExp: return std::exp(arg(0));
    case Kind::kLog: {
      double a = arg(0);
      if (a <= 0.0) throw EvalError("log of a non-positive value");
      return std::log(a);
    }
    case Kind::kSqrt: {
      double a = arg(0);
      if (a < 0.0) throw EvalError("sqrt of a negative value");
      return std::sqrt(a);
    }
    case Kind::kAbs: return std::abs(arg(0));
    case Kind::kMin: return std::min(arg(0), arg(1));
    case Kind::kMax: return std::max(arg(0), arg(1));
    case Kind::kPiecewise: return arg(0) < 0.0 ? arg(1) : arg(2);
    case Kind::kKink: {
      double s = arg(0);
      if (s == 0.0) throw EvalError("derivative requested at a kink");
      return s < 0.0 ? arg(1) : arg(2);
    }
  }
  throw EvalError("unknown node");
}

Expr Expr::derivative(int v) const {
  const Node& n = *node_;
  auto a = [&](int i) -> const Expr& { return n.args[static_cast<size_t>(i)]; };
  auto da = [&](int i) { return a(i).derivative(v); };
  switch (n.kind) {
    case Kind::kConst: return constant(0.0);
    case Kind::kVar: return constant(n.var == v ? 1.0 : 0.0);
    case Kind::kAdd: return da(0) + da(1);
    case Kind::kSub: return da(0) - da(1);
    case Kind::kMul: return da(0) * a(1) + a(0) * da(1);
    case Kind::kDiv: return (da(0) * a(1) - a(0) * da(1)) / (a(1) * a(1));
    case Kind::kNeg: return -da(0);
    case Kind::kPow: {
      if (is_const(a(1))) {
        double c = a(1).constant_value();
        return constant(c) * pow(a(0), constant(c - 1.0)) * da(0);
      }
      // d(u^w) = u^w (w' log u + w u'/u)
      return *this * (da(1) * unary(Kind::kLog, a(0)) + a(1) * da(0) / a(0));
    }
    case Kind::kSin: return unary(Kind::kCos, a(0)) * da(0);
    case Kind::kCos: return -(unary(Kind::kSin, a(0)) * da(0));
    case Kind::kExp: return *this * da(0);
    case Kind::kLog: return da(0) / a(0);
    case Kind::kSqrt: return da(0) / (constant(2.0) * *this);
    case Kind::kAbs: return select(Kind::kKink, a(0), -da(0), da(0));
    case Kind::kMin: return select(Kind::kKink, a(0) - a(1), da(0), da(1));
    case Kind::kMax: return select(Kind::kKink, a(0) - a(1), da(1), da(0));
    case Kind::kPiecewise:
    case Kind::kKink: return select(Kind::kKink, a(0), a(1).derivative(v), a(2).derivative(v));
  }
  throw EvalError("unknown node");
}

namespace {
const char* func_name(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::kSin: return "sin";
    case Expr::Kind::kCos: return "cos";
    case Expr::Kind::kExp: return "exp";
    case Expr::Kind::kLog: return "log";
    case Expr::Kind::kSqrt: return "sqrt";
    case Expr::Kind::kAbs: return "abs";
    case Expr::Kind::kMin: return "min";
    case Expr::Kind::kMax: return "max";
    case Expr::Kind::kPiecewise: return "pw";
    case Expr::Kind::kKink: return "kink";
    default: return nullptr;
  }
}
}  // namespace

std::string Expr::to_string() const {
  const Node& n = *node_;
  auto s = [&](int i) { return n.args[static_cast<size_t>(i)].to_string(); };
  switch (n.kind) {
    case Kind::kConst: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.c);
      std::string out = buf;
      return n.c < 0 ? "(" + out + ")" : out;
    }
    case Kind::kVar: return "x" + std::to_string(n.var);
    case Kind::kAdd: return "(" + s(0) + " + " + s(1) + ")";
    case Kind::kSub: return "(" + s(0) + " - " + s(1) + ")";
    case Kind::kMul: return "(" + s(0) + " * " + s(1) + ")";
    case Kind::kDiv: return "(" + s(0) + " / " + s(1) + ")";
    case Kind::kPow: return "(" + s(0) + " ^ " + s(1) + ")";
    case Kind::kNeg: return "(-" + s(0) + ")";
    default: {
      std::string out = std::string(func_name(n.kind)) + "(";
      for (size_t i = 0; i < n.args.size(); ++i) out += (i ? ", " : "") + n.args[i].to_string();
      return out + ")";
    }
  }
}

int Expr::max_variable() const {
  int m = node_->kind == Kind::kVar ? node_->var : -1;
  for (const auto& a : node_->args) m = std::max(m, a.max_variable());
  return m;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int n_vars) : s_(text), n_(n_vars) {}

  Expr run() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw EvalError("parse error at column " + std::to_string(pos_ + 1) + ": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) e = e + term();
      else if (accept('-')) e = e - term();
      else return e;
    }
  }
  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) e = e * unary();
      else if (accept('/')) e = e / unary();
      else return e;
    }
  }
  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }
  Expr power() {
    Expr base = primary();
    if (accept('^')) return Expr::pow(base, unary());
    return base;
  }
  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }
  Expr number() {
    std::string buf(s_.substr(pos_));
    char* end = nullptr;
    double v = std::strtod(buf.c_str(), &end);
    if (end == buf.c_str()) fail("malformed number");
    pos_ += static_cast<size_t>(end - buf.c_str());
    return Expr::constant(v);
  }
  Expr identifier() {
    size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    std::string id(s_.substr(start, pos_ - start));
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') return call(id, start);
    if (id == "pi") return Expr::constant(std::numbers::pi);
    if (id == "x" && n_ == 1) return Expr::variable(0);
    if (id.size() > 1 && id[0] == 'x' &&
        id.find_first_not_of("0123456789", 1) == std::string::npos) {
      int idx = std::stoi(id.substr(1));
      if (idx >= n_) {
        pos_ = start;
        fail("variable " + id + " out of range for n = " + std::to_string(n_));
      }
      return Expr::variable(idx);
    }
    pos_ = start;
    fail("unknown identifier '" + id + "'");
  }
  Expr call(const std::string& name, size_t start) {
    expect('(');
    std::vector<Expr> args;
    if (!accept(')')) {
      do args.push_back(expr());
      while (accept(','));
      expect(')');
    }
    using K = Expr::Kind;
    struct Fn { const char* name; K kind; size_t arity; };
    static constexpr Fn fns[] = {
        {"sin", K::kSin, 1},  {"cos", K::kCos, 1},  {"exp", K::kExp, 1},
        {"log", K::kLog, 1},  {"sqrt", K::kSqrt, 1}, {"abs", K::kAbs, 1},
        {"min", K::kMin, 2},  {"max", K::kMax, 2},  {"pw", K::kPiecewise, 3},
        {"kink", K::kKink, 3},
    };
    for (const auto& f : fns) {
      if (name != f.name) continue;
      if (args.size() != f.arity) {
        pos_ = start;
        fail(name + " takes " + std::to_string(f.arity) + " argument(s)");
      }
      if (f.arity == 1) return Expr::unary(f.kind, args[0]);
      if (f.arity == 2) return Expr::select(f.kind, Expr(), args[0], args[1]);
      return Expr::select(f.kind, args[0], args[1], args[2]);
    }
    pos_ = start;
    fail("unknown function '" + name + "'");
  }

  std::string_view s_;
  int n_;
  size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(std::string_view text, int n_vars) { return Parser(text, n_vars).run(); }

}  // namespace varcalc
