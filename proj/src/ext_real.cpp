#include "varcalc/ext_real.hpp"

#include <cmath>
#include <cstdio>

#include "varcalc/common.hpp"

namespace varcalc {

ExtReal::ExtReal(double v) : v_(v) {
  if (std::isnan(v)) throw NumericalError("ExtReal: NaN is not an extended real");
  if (v == -std::numeric_limits<double>::infinity()) {
    throw NumericalError("ExtReal: -inf is outside R ∪ {+inf}");
  }
}

double ExtReal::finite_value() const {
  if (!is_finite()) throw DomainError("ExtReal: value is +inf");
  return v_;
}

ExtReal operator+(ExtReal a, ExtReal b) {
  if (a.is_infinite() || b.is_infinite()) return ExtReal::infinity();
  return ExtReal(a.v_ + b.v_);
}

ExtReal operator-(ExtReal a, double b) {
  if (!std::isfinite(b)) throw NumericalError("ExtReal: subtracting a non-finite value");
  if (a.is_infinite()) return a;
  return ExtReal(a.v_ - b);
}

ExtReal operator*(double c, ExtReal a) {
  if (std::isnan(c) || std::isinf(c)) throw NumericalError("ExtReal: non-finite scale");
  if (a.is_infinite()) {
    if (c == 0.0) return ExtReal(0.0);
    if (c < 0.0) throw NumericalError("ExtReal: negative multiple of +inf");
    return a;
  }
  return ExtReal(c * a.v_);
}

std::string ExtReal::to_string() const {
  if (is_infinite()) return "+inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v_);
  return buf;
}

ExtReal min(ExtReal a, ExtReal b) { return b < a ? b : a; }
ExtReal max(ExtReal a, ExtReal b) { return a < b ? b : a; }

}  // namespace varcalc
