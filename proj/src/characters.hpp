// Characters of Q_p^x and the standard additive character, with exact values.
//
// A character of the units mod p^c is stored by its exponents against fixed
// generators of (Z/p^c)^x (one primitive root for odd p; -1 and 5 for p = 2,
// c >= 3), so products, inverses, conductors, and evaluations are all exact
// integer arithmetic on top of cached discrete-log tables.  A character of
// the full multiplicative group adds its value on the uniformizer as a
// modulus times a rational angle.  Gauss sums and epsilon factors then reduce
// to AngleAccumulator sums, which keep conjugate-pair cancellation exact.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "angle.hpp"
#include "padic.hpp"

namespace tpl {

// Structure of (Z/p^c)^x: generators, their orders, and a full discrete-log
// table.  Instances are cached per (p, c) and safe to share across threads.
struct UnitGroup {
  std::int64_t p = 0;
  int c = 0;
  std::uint64_t modulus = 1;
  std::vector<std::uint64_t> gens;
  std::vector<std::int64_t> orders;
  // dlog[u] = exponent vector packed as e0 + e1 * orders[0]; -1 for non-units.
  std::vector<std::int64_t> dlog;

  std::vector<std::int64_t> exponents_of(std::uint64_t u) const;
};

const UnitGroup& unit_group(std::int64_t p, int c);

// Character of (Z/p^c)^x.  Canonical storage level is max(conductor, 1), so
// equal characters compare equal regardless of construction history.
class UnitChar {
 public:
  UnitChar() = default;

  static UnitChar trivial(std::int64_t p);
  static UnitChar from_exponents(std::int64_t p, int c,
                                 std::vector<std::int64_t> exps);
  // Solve for exponents from values on the generators; validates that the
  // assignment extends to a homomorphism on the whole group.
  static UnitChar from_values(std::int64_t p, int c,
                              const std::function<Angle(std::uint64_t)>& val);
  // Uniformly random character with exact conductor c (throws if none
  // exists, e.g. p = 2, c = 1).
  static UnitChar random_with_conductor(std::int64_t p, int c,
                                        std::mt19937_64& rng);

  std::int64_t prime() const { return p_; }
  int level() const { return c_; }
  int conductor() const { return conductor_; }
  bool is_trivial() const { return conductor_ == 0; }
  // Canonical exponents against the level's fixed generators.
  const std::vector<std::int64_t>& exponents() const { return exps_; }
  // The order of the character in the dual group.
  std::int64_t order() const;

  // chi(u), u a unit given mod p^k for any k >= level().
  Angle angle(std::uint64_t u) const;
  cplx value(std::uint64_t u) const { return angle(u).to_complex(); }

  UnitChar inverse() const;
  friend UnitChar operator*(const UnitChar& a, const UnitChar& b);
  UnitChar pow(std::int64_t k) const;

  friend bool operator==(const UnitChar& a, const UnitChar& b) {
    return a.p_ == b.p_ && a.c_ == b.c_ && a.exps_ == b.exps_;
  }
  friend bool operator!=(const UnitChar& a, const UnitChar& b) {
    return !(a == b);
  }
  friend bool operator<(const UnitChar& a, const UnitChar& b) {
    if (a.p_ != b.p_) return a.p_ < b.p_;
    if (a.c_ != b.c_) return a.c_ < b.c_;
    return a.exps_ < b.exps_;
  }

  // Recomputes the conductor from scratch and checks the stored value.
  bool verify_conductor() const;

 private:
  std::int64_t p_ = 0;
  int c_ = 1;           // storage level, = max(conductor, 1)
  int conductor_ = 0;
  std::vector<std::int64_t> exps_;

  static int compute_conductor(std::int64_t p, int c,
                               const std::vector<std::int64_t>& exps);
  static int enumerate_conductor(std::int64_t p, int c,
                                 const std::vector<std::int64_t>& exps);
  static UnitChar at_level(std::int64_t p, int c,
                           std::vector<std::int64_t> exps);
};

// Character of Q_p^x: unit part plus the value on the uniformizer p, stored
// as modulus (positive real) times a rational angle.
struct MultChar {
  UnitChar unit;
  double abs_pi = 1.0;
  Angle arg_pi;

  std::int64_t prime() const { return unit.prime(); }
  int conductor() const { return unit.conductor(); }
  bool is_unramified() const { return unit.is_trivial(); }
  bool is_unitary() const { return abs_pi == 1.0; }

  static MultChar unramified(std::int64_t p, double abs, Angle arg) {
    return MultChar{UnitChar::trivial(p), abs, arg};
  }
  static MultChar from_unit(UnitChar u) { return MultChar{std::move(u), 1.0, Angle()}; }

  // Value on p^v * (unit u); exact-zero input is a domain error.
  cplx value_at(int v, std::uint64_t u) const;
  cplx value(const Zp& x) const;
  // |chi(p^v u)| and arg as an exact angle (valid when abs_pi == 1).
  Angle angle_at(int v, std::uint64_t u) const;

  MultChar inverse() const;
  friend MultChar operator*(const MultChar& a, const MultChar& b);
};

// The standard additive character psi (trivial on Z_p, not on p^-1 Z_p) and
// its conjugate: psi_angle(sigma, x) is the angle of psi^sigma(x), sigma in
// {+1, -1}.  A bounded zero with vmin >= 0 is fine (angle 0); anything that
// might stick out of Z_p without enough digits raises PrecisionError.
Angle psi_angle(int sigma, const Zp& x);

// epsilon(s, chi, psi^sigma) for the standard additive character.  Exact
// paths: the unit-root sum is accumulated by angle, and q^{-cs} is applied as
// an exact rational when 2cs is an even integer, or rational / sqrt(q) when
// odd, so self-dual cases come out bit-exact.
cplx epsilon_factor(double s, const MultChar& chi, int sigma);
inline cplx epsilon_factor(double s, const UnitChar& chi, int sigma) {
  return epsilon_factor(s, MultChar::from_unit(chi), sigma);
}

// Kronecker symbol (a|n), n any nonzero integer (multiplicative lift of the
// Jacobi symbol with the standard conventions at 2 and -1).
int kronecker_symbol(std::int64_t a, std::int64_t n);

// Local component at p of the quadratic character attached to a fundamental
// discriminant D: the unit part matches u -> (D|u) on units, and the value at
// the uniformizer defaults to 1 (the global-assembly identities do not depend
// on it; a different unitary choice may be passed in).
MultChar kronecker_component(std::int64_t D, std::int64_t p,
                             Angle arg_pi = Angle());

// A uniformly random rational angle with small denominator (for unitary
// character values at the uniformizer).
Angle random_angle(std::mt19937_64& rng);

}  // namespace tpl
