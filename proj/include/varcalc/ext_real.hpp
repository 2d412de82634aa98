#pragma once

#include <compare>
#include <limits>
#include <string>

namespace varcalc {

// A value in R ∪ {+inf}. Anything that would produce -inf or NaN throws.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  ExtReal(double v);  // NOLINT(google-explicit-constructor)

  static ExtReal infinity() { return ExtReal(std::numeric_limits<double>::infinity()); }

  bool is_finite() const { return v_ != std::numeric_limits<double>::infinity(); }
  bool is_infinite() const { return !is_finite(); }
  // +inf is returned as the IEEE infinity.
  double value() const { return v_; }
  double finite_value() const;

  friend ExtReal operator+(ExtReal a, ExtReal b);
  friend ExtReal operator-(ExtReal a, double b);
  friend ExtReal operator*(double c, ExtReal a);
  ExtReal& operator+=(ExtReal o) { return *this = *this + o; }

  friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(ExtReal a, ExtReal b) {
    if (a.v_ < b.v_) return std::strong_ordering::less;
    if (a.v_ > b.v_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  std::string to_string() const;

 private:
  double v_ = 0.0;
};

ExtReal min(ExtReal a, ExtReal b);
ExtReal max(ExtReal a, ExtReal b);

}  // namespace varcalc
