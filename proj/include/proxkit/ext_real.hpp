#pragma once

#include <cmath>
#include <limits>
#include <ostream>

#include "proxkit/errors.hpp"

namespace proxkit {

// Value in ]-inf, +inf]. Never NaN, never -inf.
class ExtReal {
 public:
  constexpr ExtReal() = default;

  static ExtReal finite(double v) {
    if (!std::isfinite(v)) throw ParameterError("ExtReal::finite: non-finite payload");
    return ExtReal(v);
  }
  static constexpr ExtReal plus_infinity() { return ExtReal(std::numeric_limits<double>::infinity()); }

  // Accepts +inf as PlusInfinity; rejects NaN and -inf.
  static ExtReal from_double(double v) {
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
      throw ParameterError("ExtReal::from_double: NaN or -inf");
    }
    return ExtReal(v);
  }

  bool is_finite() const { return v_ != std::numeric_limits<double>::infinity(); }
  bool is_infinite() const { return !is_finite(); }

  double value() const {
    if (!is_finite()) throw ParameterError("ExtReal::value on +inf");
    return v_;
  }
  // +inf maps to std::numeric_limits<double>::infinity().
  double as_double() const { return v_; }

  friend ExtReal operator+(ExtReal a, ExtReal b) { return ExtReal(a.v_ + b.v_); }
  friend ExtReal operator+(ExtReal a, double b) { return a + ExtReal::finite(b); }
  // Scaling by a nonnegative factor; 0 * (+inf) = +inf (indicator convention).
  friend ExtReal operator*(double s, ExtReal a) {
    if (s < 0 || std::isnan(s)) throw ParameterError("ExtReal: negative scale");
    if (a.is_infinite()) return a;
    return ExtReal(s * a.v_);
  }
  friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
  friend auto operator<=>(ExtReal a, ExtReal b) { return a.v_ <=> b.v_; }

  friend std::ostream& operator<<(std::ostream& os, ExtReal a) {
    if (a.is_infinite()) return os << "+inf";
    return os << a.v_;
  }

 private:
  constexpr explicit ExtReal(double v) : v_(v) {}
  double v_ = 0.0;
};

}  // namespace proxkit
