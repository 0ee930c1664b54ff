#pragma once

#include <cmath>
#include <cstdint>

namespace npq {

/// Non-negative-range-safe real stored as mantissa * 2^exponent. Used where
/// intermediate powers and binomial terms would leave the double range even
/// though the quantities eventually formed from them do not.
class ScaledReal {
 public:
  ScaledReal() = default;
  explicit ScaledReal(double v) : mant_(v) { normalize(); }

  static ScaledReal from_parts(double mant, std::int64_t exponent) {
    ScaledReal s;
    s.mant_ = mant;
    s.exp_ = exponent;
    s.normalize();
    return s;
  }

  /// base^n by binary exponentiation, one rounding per multiply.
  static ScaledReal pow(double base, std::int64_t n) {
    if (n < 0) return pow(base, -n).reciprocal();
    ScaledReal result(1.0);
    ScaledReal b(base);
    while (n > 0) {
      if (n & 1) result *= b;
      n >>= 1;
      if (n > 0) b *= b;
    }
    return result;
  }

  ScaledReal reciprocal() const { return from_parts(1.0 / mant_, -exp_); }

  ScaledReal& operator*=(const ScaledReal& o) {
    mant_ *= o.mant_;
    exp_ += o.exp_;
    normalize();
    return *this;
  }
  ScaledReal& operator*=(double f) {
    mant_ *= f;
    normalize();
    return *this;
  }

  ScaledReal& operator+=(const ScaledReal& o) {
    if (o.mant_ == 0.0) return *this;
    if (mant_ == 0.0) return *this = o;
    const std::int64_t shift = o.exp_ - exp_;
    if (shift > 1100) return *this = o;
    if (shift < -1100) return *this;
    mant_ += std::ldexp(o.mant_, static_cast<int>(shift));
    normalize();
    return *this;
  }

  friend ScaledReal operator*(ScaledReal a, const ScaledReal& b) { return a *= b; }
  friend ScaledReal operator*(ScaledReal a, double b) { return a *= b; }
  friend ScaledReal operator+(ScaledReal a, const ScaledReal& b) { return a += b; }

  /// Nearest double; underflows to subnormals/zero and overflows to inf.
  double to_double() const {
    if (mant_ == 0.0) return 0.0;
    if (exp_ > 4096) return std::copysign(HUGE_VAL, mant_);
    if (exp_ < -4096) return std::copysign(0.0, mant_);
    return std::ldexp(mant_, static_cast<int>(exp_));
  }

  double mantissa() const { return mant_; }
  std::int64_t exponent() const { return exp_; }

 private:
  void normalize() {
    if (mant_ == 0.0 || !std::isfinite(mant_)) {
      if (mant_ == 0.0) exp_ = 0;
      return;
    }
    int e = 0;
    mant_ = std::frexp(mant_, &e);
    exp_ += e;
  }

  double mant_ = 0.0;
  std::int64_t exp_ = 0;
};

}  // namespace npq
