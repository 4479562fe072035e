#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>

namespace pmc {

/// Exact rational arithmetic on small operands. Used where the connection
/// fixtures must hold bit-for-bit rather than to rounding error.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}
  constexpr Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }

  friend constexpr Rational operator+(Rational a, Rational b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend constexpr Rational operator-(Rational a, Rational b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend constexpr Rational operator*(Rational a, Rational b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend constexpr Rational operator/(Rational a, Rational b) {
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }
  constexpr Rational operator-() const { return Rational(-num_, den_); }
  friend constexpr bool operator==(Rational a, Rational b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend constexpr bool operator!=(Rational a, Rational b) { return !(a == b); }
  friend constexpr bool operator<(Rational a, Rational b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
  }

  constexpr double to_double() const { return double(num_) / double(den_); }

  friend std::ostream& operator<<(std::ostream& os, Rational r) {
    os << r.num_;
    if (r.den_ != 1) os << '/' << r.den_;
    return os;
  }

 private:
  constexpr void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace pmc
