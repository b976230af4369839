// Exact rational arithmetic on int64 with overflow detection.
//
// Everything "global" in this project (measure weights, the assembled
// arithmetic constant, zeta values at integer arguments) is rational, so
// consistency checks can demand equality instead of a float tolerance.
// Intermediates go through __int128; anything that would leave int64 after
// reduction throws.

#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tpl {

struct Rat64 {
  // Invariant: den > 0, gcd(|num|, den) = 1.
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rat64() = default;
  Rat64(std::int64_t n) : num(n), den(1) {}
  Rat64(std::int64_t n, std::int64_t d) { *this = make(n, d); }

  static Rat64 make_checked(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("Rat64: zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw std::overflow_error("Rat64: overflow after reduction");
    Rat64 r;
    r.num = static_cast<std::int64_t>(n);
    r.den = static_cast<std::int64_t>(d);
    return r;
  }
  static Rat64 make(std::int64_t n, std::int64_t d) {
    return make_checked(static_cast<__int128>(n), static_cast<__int128>(d));
  }

  friend Rat64 operator+(const Rat64& a, const Rat64& b) {
    return make_checked(static_cast<__int128>(a.num) * b.den +
                            static_cast<__int128>(b.num) * a.den,
                        static_cast<__int128>(a.den) * b.den);
  }
  friend Rat64 operator-(const Rat64& a, const Rat64& b) {
    return make_checked(static_cast<__int128>(a.num) * b.den -
                            static_cast<__int128>(b.num) * a.den,
                        static_cast<__int128>(a.den) * b.den);
  }
  friend Rat64 operator*(const Rat64& a, const Rat64& b) {
    return make_checked(static_cast<__int128>(a.num) * b.num,
                        static_cast<__int128>(a.den) * b.den);
  }
  friend Rat64 operator/(const Rat64& a, const Rat64& b) {
    if (b.num == 0) throw std::domain_error("Rat64: division by zero");
    return make_checked(static_cast<__int128>(a.num) * b.den,
                        static_cast<__int128>(a.den) * b.num);
  }
  Rat64 operator-() const { Rat64 r; r.num = -num; r.den = den; return r; }
  Rat64& operator+=(const Rat64& b) { return *this = *this + b; }
  Rat64& operator-=(const Rat64& b) { return *this = *this - b; }
  Rat64& operator*=(const Rat64& b) { return *this = *this * b; }
  Rat64& operator/=(const Rat64& b) { return *this = *this / b; }

  friend bool operator==(const Rat64& a, const Rat64& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rat64& a, const Rat64& b) { return !(a == b); }
  friend bool operator<(const Rat64& a, const Rat64& b) {
    return static_cast<__int128>(a.num) * b.den <
           static_cast<__int128>(b.num) * a.den;
  }

  double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  std::string to_string() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

 private:
  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) { __int128 t = a % b; a = b; b = t; }
    return a < 0 ? -a : a;
  }
};

// q^e as an exact rational (e may be negative); q small (a prime here).
inline Rat64 rat_pow(std::int64_t q, int e) {
  Rat64 r{1};
  Rat64 base = e >= 0 ? Rat64{q} : Rat64{1, q};
  int n = e >= 0 ? e : -e;
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

}  // namespace tpl
