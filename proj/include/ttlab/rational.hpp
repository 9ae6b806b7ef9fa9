#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "ttlab/error.hpp"

namespace ttlab {

// Exact rational arithmetic on a checked 128-bit integer core. Values are
// kept reduced (gcd 1, denominator > 0); any overflow throws Err::Overflow
// instead of wrapping. Cone and subspace work stays well inside the range,
// the float lane takes over for long-sequence statistics.
class Rational {
 public:
  using Int = __int128;

  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT implicit by design
  Rational(long long n, long long d) : num_(n), den_(d) { reduce(); }
  static Rational from_int128(Int n, Int d) {
    Rational r;
    r.num_ = n;
    r.den_ = d;
    r.reduce();
    return r;
  }

  Int num() const { return num_; }
  Int den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_int128(add_chk(mul_chk(a.num_, b.den_), mul_chk(b.num_, a.den_)),
                       mul_chk(a.den_, b.den_));
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from_int128(sub_chk(mul_chk(a.num_, b.den_), mul_chk(b.num_, a.den_)),
                       mul_chk(a.den_, b.den_));
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_int128(mul_chk(a.num_, b.num_), mul_chk(a.den_, b.den_));
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) fail(Err::Overflow, "rational division by zero");
    return from_int128(mul_chk(a.num_, b.den_), mul_chk(a.den_, b.num_));
  }
  Rational operator-() const { return from_int128(-num_, den_); }
  Rational& operator+=(const Rational& b) { return *this = *this + b; }
  Rational& operator-=(const Rational& b) { return *this = *this - b; }
  Rational& operator*=(const Rational& b) { return *this = *this * b; }
  Rational& operator/=(const Rational& b) { return *this = *this / b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return sub_chk(mul_chk(a.num_, b.den_), mul_chk(b.num_, a.den_)) < 0;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational abs() const { return num_ < 0 ? -*this : *this; }

  // "p/q" with q omitted when 1; the serialization format for exact weights.
  std::string str() const {
    std::string s = int_str(num_);
    if (den_ != 1) s += "/" + int_str(den_);
    return s;
  }
  static Rational parse(const std::string& s);

 private:
  static Int add_chk(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r)) fail(Err::Overflow, "rational add");
    return r;
  }
  static Int sub_chk(Int a, Int b) {
    Int r;
    if (__builtin_sub_overflow(a, b, &r)) fail(Err::Overflow, "rational sub");
    return r;
  }
  static Int mul_chk(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) fail(Err::Overflow, "rational mul");
    return r;
  }
  static Int gcd128(Int a, Int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      Int t = a % b;
      a = b;
      b = t;
    }
    return a;
  }
  static std::string int_str(Int v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    std::string out;
    // -2^127 negation would overflow; reduced rationals never reach it.
    if (neg) v = -v;
    while (v > 0) {
      out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
      v /= 10;
    }
    if (neg) out.push_back('-');
    return {out.rbegin(), out.rend()};
  }
  void reduce() {
    if (den_ == 0) fail(Err::Overflow, "zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    if (num_ == 0) {
      den_ = 1;
      return;
    }
    Int g = gcd128(num_, den_);
    num_ /= g;
    den_ /= g;
  }

  Int num_;
  Int den_;
};

inline Rational Rational::parse(const std::string& s) {
  auto parse_int = [](const std::string& t) -> Int {
    if (t.empty()) fail(Err::IoError, "empty rational literal");
    Int v = 0;
    bool neg = false;
    size_t i = 0;
    if (t[0] == '-' || t[0] == '+') {
      neg = t[0] == '-';
      i = 1;
    }
    if (i == t.size()) fail(Err::IoError, "bad rational literal");
    for (; i < t.size(); ++i) {
      if (t[i] < '0' || t[i] > '9') fail(Err::IoError, "bad rational literal: " + t);
      v = mul_chk(v, 10);
      v = add_chk(v, t[i] - '0');
    }
    return neg ? -v : v;
  };
  auto slash = s.find('/');
  if (slash == std::string::npos) return from_int128(parse_int(s), 1);
  return from_int128(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
}

}  // namespace ttlab
