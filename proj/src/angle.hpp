// Rational angles (fractions of a full turn) and exact accumulators for
// root-of-unity sums.
//
// Every character value in this project is a root of unity times an optional
// real modulus, so sums of character values are sums of e^{2πi t} with t
// rational.  We keep the angles exact for as long as possible:
//
//  * Angle        — t in Q/Z, reduced, with exact group arithmetic;
//  * AngleAccumulator — groups rational coefficients by angle before any trig,
//    so conjugate pairs cancel bitwise and small Gauss sums come out exact;
//  * PrimePowerCyclotomic — an exact element of Z[ζ_{p^K}] with rational
//    coefficients, reduced modulo the cyclotomic polynomial Φ_{p^K}; this is
//    what makes the additive-measure identities testable as exact rationals.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rational.hpp"

namespace tpl {

using cplx = std::complex<double>;

struct Angle {
  // Represents e^{2πi num/den}; invariant: den >= 1, 0 <= num < den, reduced.
  std::int64_t num = 0;
  std::int64_t den = 1;

  Angle() = default;
  Angle(std::int64_t n, std::int64_t d) {
    if (d <= 0) throw std::domain_error("Angle: nonpositive denominator");
    __int128 nn = static_cast<__int128>(n) % d;
    if (nn < 0) nn += d;
    std::int64_t g = std::gcd(static_cast<std::int64_t>(nn), d);
    num = static_cast<std::int64_t>(nn) / g;
    den = d / g;
  }

  static Angle zero() { return Angle(); }
  bool is_zero() const { return num == 0; }

  friend Angle operator+(const Angle& a, const Angle& b) {
    __int128 n = static_cast<__int128>(a.num) * b.den +
                 static_cast<__int128>(b.num) * a.den;
    __int128 d = static_cast<__int128>(a.den) * b.den;
    __int128 m = n % d;
    if (m < 0) m += d;
    __int128 g = gcd128(m, d);
    if (g > 1) { m /= g; d /= g; }
    if (d > INT64_MAX) throw std::overflow_error("Angle: denominator overflow");
    Angle r;
    r.num = static_cast<std::int64_t>(m);
    r.den = static_cast<std::int64_t>(d);
    return r;
  }
  Angle operator-() const {
    Angle r;
    r.den = den;
    r.num = num == 0 ? 0 : den - num;
    return r;
  }
  friend Angle operator-(const Angle& a, const Angle& b) { return a + (-b); }
  Angle times(std::int64_t k) const {
    __int128 kk = static_cast<__int128>(k) % den;
    if (kk < 0) kk += den;
    return Angle(static_cast<std::int64_t>(
                     (kk * num) % den),
                 den);
  }
  friend bool operator<(const Angle& a, const Angle& b) {
    return static_cast<__int128>(a.num) * b.den <
           static_cast<__int128>(b.num) * a.den;
  }
  friend bool operator==(const Angle& a, const Angle& b) {
    return a.num == b.num && a.den == b.den;
  }

  // e^{2πi t}.  Angles in (1/2, 1) evaluate as the conjugate of 1 - t, so a
  // conjugate pair of angles yields bitwise-conjugate complex values and their
  // sum has an exactly real total.  Denominators dividing 12 or 8 use the
  // algebraic values (these are the ones acceptance pins exactly, e.g. the
  // quadratic Gauss sum mod 3).
  cplx to_complex() const {
    if (2 * num > den) {
      cplx z = Angle(den - num, den).to_complex();
      return std::conj(z);
    }
    if (den == 1) return {1.0, 0.0};
    if (den == 2) return {-1.0, 0.0};  // num == 1
    const double h = 0.5;
    const double r3 = std::sqrt(3.0) / 2;
    const double r2 = std::sqrt(2.0) / 2;
    if (den == 3) return {-h, r3};                     // num == 1
    if (den == 4) return {0.0, 1.0};                   // num == 1
    if (den == 6) return {h, r3};                      // num == 1
    if (den == 12) {
      if (num == 1) return {r3, h};
      if (num == 5) return {-r3, h};
    }
    if (den == 8) {
      if (num == 1) return {r2, r2};
      if (num == 3) return {-r2, r2};
    }
    long double t = static_cast<long double>(num) / den;
    long double a = 2.0L * 3.14159265358979323846264338327950288L * t;
    return {static_cast<double>(std::cos(a)), static_cast<double>(std::sin(a))};
  }

 private:
  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) { __int128 t = a % b; a = b; b = t; }
    return a < 0 ? -a : a;
  }
};

// Sum of coeff * e^{2πi angle}, grouped exactly by angle; one complex
// evaluation per distinct angle at the end.
class AngleAccumulator {
 public:
  void add(const Angle& a, const Rat64& coeff) {
    auto [it, inserted] = terms_.try_emplace(a, coeff);
    if (!inserted) it->second += coeff;
  }
  cplx to_complex() const {
    cplx total{0.0, 0.0};
    for (const auto& [a, c] : terms_) {
      if (c.num == 0) continue;
      total += c.to_double() * a.to_complex();
    }
    return total;
  }

 private:
  std::map<Angle, Rat64> terms_;
};

// Exact element of Q(ζ), ζ = e^{2πi/p^K}, as a coefficient vector on the
// power basis ζ^0..ζ^{φ(p^K)-1} with the Φ_{p^K} reduction
//   ζ^{φ + r} = -Σ_{j=0}^{p-2} ζ^{r + j p^{K-1}},   0 <= r < p^{K-1}.
// Used where a sum of p^K-th roots of unity must be recognized as an exact
// rational (the additive character integrals).
class PrimePowerCyclotomic {
 public:
  PrimePowerCyclotomic(std::int64_t p, int K) : p_(p), K_(K) {
    if (K < 1) throw std::domain_error("cyclotomic: K >= 1 required");
    pK1_ = 1;
    for (int i = 0; i + 1 < K; ++i) pK1_ *= p;
    phi_ = (p - 1) * pK1_;
    coeff_.assign(static_cast<size_t>(phi_), Rat64{0});
  }

  std::int64_t modulus() const { return pK1_ * p_; }

  // Adds coeff * ζ^e (e taken mod p^K).
  void add_root(std::int64_t e, const Rat64& coeff) {
    std::int64_t m = modulus();
    e %= m;
    if (e < 0) e += m;
    if (e < phi_) {
      coeff_[static_cast<size_t>(e)] += coeff;
      return;
    }
    std::int64_t r = e - phi_;  // 0 <= r < p^{K-1}
    for (std::int64_t j = 0; j + 1 < p_; ++j)
      coeff_[static_cast<size_t>(r + j * pK1_)] -= coeff;
  }

  bool is_rational() const {
    for (size_t i = 1; i < coeff_.size(); ++i)
      if (coeff_[i].num != 0) return false;
    return true;
  }
  // The rational value, valid only when is_rational().
  Rat64 rational_part() const {
    if (!is_rational())
      throw std::logic_error("cyclotomic: value is not rational");
    return coeff_[0];
  }

 private:
  std::int64_t p_;
  int K_;
  std::int64_t pK1_;   // p^{K-1}
  std::int64_t phi_;   // (p-1) p^{K-1}
  std::vector<Rat64> coeff_;
};

}  // namespace tpl
