#pragma once

#include <cstdint>
#include <string>

#include "wavebal/errors.hpp"

namespace wavebal {

/// Exact rational number on a checked 128-bit integer core.
///
/// Every operation normalizes (positive denominator, reduced by gcd) and
/// throws ExactOverflow instead of wrapping, so an exact-mode computation
/// either returns the true value or refuses loudly. 128 bits comfortably
/// cover the transition-matrix identities up to dimension 16; larger
/// dimensions overflow by design rather than degrade silently.
class Rational {
 public:
  using Int = __int128;

  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit on purpose
  Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

  static Rational from_int128(Int n, Int d) {
    Rational r;
    r.num_ = n;
    r.den_ = d;
    r.normalize();
    return r;
  }

  Rational operator-() const { return from_raw(-num_, den_); }

  Rational& operator+=(const Rational& o) {
    // a/b + c/d with b, d > 0; reduce through g = gcd(b, d) first.
    const Int g = gcd(den_, o.den_);
    const Int b1 = den_ / g;
    const Int d1 = o.den_ / g;
    num_ = checked_add(checked_mul(num_, d1), checked_mul(o.num_, b1));
    den_ = checked_mul(b1, o.den_);
    normalize();
    return *this;
  }
  Rational& operator-=(const Rational& o) { return *this += -o; }

  Rational& operator*=(const Rational& o) {
    // Cross-reduce before multiplying to keep the factors small.
    const Int g1 = gcd(abs128(num_), o.den_);
    const Int g2 = gcd(abs128(o.num_), den_);
    num_ = checked_mul(num_ / g1, o.num_ / g2);
    den_ = checked_mul(den_ / g2, o.den_ / g1);
    return *this;  // inputs reduced, so the result already is
  }

  Rational& operator/=(const Rational& o) {
    if (o.num_ == 0) throw NumericalError("rational division by zero");
    Rational inv = from_raw(o.den_, o.num_);
    if (inv.den_ < 0) {
      inv.num_ = -inv.num_;
      inv.den_ = -inv.den_;
    }
    return *this *= inv;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    // a.num/a.den < b.num/b.den with positive denominators.
    return Rational(a - b).num_ < 0;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return !(b < a);
  }
  friend bool operator>=(const Rational& a, const Rational& b) {
    return !(a < b);
  }

  bool is_zero() const { return num_ == 0; }
  Rational abs() const { return num_ < 0 ? -*this : *this; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string str() const {
    std::string s = int128_str(num_);
    if (den_ != 1) s += "/" + int128_str(den_);
    return s;
  }

  Int numerator() const { return num_; }
  Int denominator() const { return den_; }

  static Rational pow(Rational base, int e) {
    if (e < 0) return pow(Rational(1) / base, -e);
    Rational out(1);
    while (e > 0) {
      if (e & 1) out *= base;
      base *= base;
      e >>= 1;
    }
    return out;
  }

 private:
  static Rational from_raw(Int n, Int d) {
    Rational r;
    r.num_ = n;
    r.den_ = d;
    r.normalize();
    return r;
  }

  static Int abs128(Int v) { return v < 0 ? -v : v; }

  static Int gcd(Int a, Int b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
      const Int t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  static Int checked_mul(Int a, Int b) {
    Int out;
    if (__builtin_mul_overflow(a, b, &out))
      throw ExactOverflow("128-bit overflow in exact rational multiply");
    return out;
  }
  static Int checked_add(Int a, Int b) {
    Int out;
    if (__builtin_add_overflow(a, b, &out))
      throw ExactOverflow("128-bit overflow in exact rational add");
    return out;
  }

  void normalize() {
    if (den_ == 0) throw NumericalError("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const Int g = gcd(num_, den_);
    num_ /= g;
    den_ /= g;
  }

  static std::string int128_str(Int v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : v;
    std::string digits;
    while (u != 0) {
      digits += static_cast<char>('0' + static_cast<int>(u % 10));
      u /= 10;
    }
    if (neg) digits += '-';
    return {digits.rbegin(), digits.rend()};
  }

  Int num_;
  Int den_;
};

inline double to_double(const Rational& r) { return r.to_double(); }
inline double to_double(double x) { return x; }

}  // namespace wavebal
