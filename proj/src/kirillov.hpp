// Supercuspidal Whittaker vectors of GL2(Q_p) with trivial central character,
// computed in the Kirillov model.
//
// A vector is a finite expansion over valuation shells and unit characters,
//   W(a(y)) = sum_r sum_nu  c_{r,nu} nu(unit(y)) 1_{v(y) = r},
// on which the Borel acts by shell shifts, character twists, and an exact
// re-expansion of additive-character multiplication through the transform
//   G_sigma(chi, t) = integral over units of chi(u) psi^sigma(t u) d^x u,
// while the Weyl element acts component-wise through a family of unimodular
// constants C_nu constrained by C_nu * C_{nu^{-1}} = 1.  Values at the corner
// representatives (1 0; p^j 1), including the a(p^{-l}) translates, follow by
// factoring the corner through the Borel and the Weyl element, so every
// corner value is an exact finite product of character sums and the C data.

#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "characters.hpp"
#include "padic.hpp"

namespace tpl {

// Raised by the Weyl action on the one configuration whose shell-shift rule
// is not the generic one (p = 2 with the component level exactly half the
// conductor, conductor >= 4); no supported grid reaches it, but silently
// using the generic rule there would be wrong.
struct ExceptionalCaseError : std::runtime_error {
  explicit ExceptionalCaseError(const std::string& what)
      : std::runtime_error(what) {}
};

// Hard bound on the conductor of any character appearing in an expansion;
// re-expansions that would exceed it throw instead of growing without bound.
inline constexpr int kLevelGuard = 8;

// All characters of (Z/p^L)^x with conductor exactly L (L = 0: the trivial
// character).  Cached per (p, L); safe to share across threads.
const std::vector<UnitChar>& chars_of_conductor(std::int64_t p, int L);

// G_sigma(chi, t): closed form (zero unless v(t) matches the conductor; a
// normalized Gauss sum on the critical shell) and the defining finite sum at
// the exact depth, kept separate so they can check each other.
cplx g_function_closed(const UnitChar& chi, const Zp& t, int sigma);
cplx g_function_bruteforce(const UnitChar& chi, const Zp& t, int sigma);

// The Weyl-action constants: C(trivial) = c1_sign, quadratic characters get
// deterministic signs, and every other character gets a deterministic fourth
// root of unity with C(nu) * C(nu^{-1}) = 1 held exactly (the inverse pair is
// derived from one canonical representative).  The constants depend only on
// (p, conductor, c1_sign, seed), never on evaluation order, so plain and dual
// vectors built from the same data agree on every shared constant.
class EpsilonData {
 public:
  EpsilonData(std::int64_t p, int c, int c1_sign, std::uint64_t seed);
  static EpsilonData random(std::int64_t p, int c, std::mt19937_64& rng);

  std::int64_t prime() const { return p_; }
  int conductor() const { return c_; }
  int c1_sign() const { return c1_; }
  std::uint64_t seed() const { return seed_; }

  cplx C(const UnitChar& nu) const;

 private:
  std::int64_t p_ = 0;
  int c_ = 2;
  int c1_ = 1;
  std::uint64_t seed_ = 0;
};

// Finite shell/character expansion of a Kirillov-model function.
class KirillovVector {
 public:
  KirillovVector() = default;
  explicit KirillovVector(std::int64_t p) : p_(p) {}

  // Characteristic function of the units: one component, shell 0, trivial
  // character, coefficient 1.
  static KirillovVector newform(std::int64_t p);

  std::int64_t prime() const { return p_; }
  const std::map<int, std::map<UnitChar, cplx>>& shells() const {
    return shells_;
  }
  bool empty() const { return shells_.empty(); }

  void add(int r, const UnitChar& nu, const cplx& coeff);
  // Drop components below rel_tol times the largest coefficient (exact
  // cancellations leave rounding dust that would otherwise masquerade as
  // extra levels).
  void prune(double rel_tol = 1e-13);

  // Largest conductor among the components.
  int max_level() const;

  // W(a(y)); exact zero is a domain error, a bounded zero below every shell
  // evaluates to 0, anything undetermined raises PrecisionError.
  cplx eval(const Zp& y) const;

 private:
  std::int64_t p_ = 0;
  std::map<int, std::map<UnitChar, cplx>> shells_;
};

// Action of (a b; 0 d) with trivial central character: shells shift by
// -v(a/d), coefficients twist by nu(unit(a/d)), and the additive character
// psi^sigma(y b/d) re-expands each shell through G_sigma against all
// characters of the forced conductor.  a and d must be regular; b may be an
// exact or nonnegative bounded zero.
KirillovVector act_borel(const KirillovVector& v, const Zp& a, const Zp& b,
                         const Zp& d, int sigma);

// Action of the Weyl element: (r, nu) -> (-r - max(c, 2 cond(nu)), nu^{-1})
// with coefficient times C(nu); an involution because the C data inverts
// exactly.
KirillovVector act_w(const KirillovVector& v, const EpsilonData& eps);

// integral over F^x of W(a(y)) psi^sigma(b y) d^x y as an exact component sum.
cplx sc_integral(const KirillovVector& v, const Zp& b, int sigma);

// The (character, coefficient) pairs at one shell, sorted by character.
std::vector<std::pair<UnitChar, cplx>> level_components(
    const KirillovVector& v, int r);

// Whittaker values of the supercuspidal newform and its a(p^{-l}) translate.
// Corner vectors are built on demand from the newform expansion:
//   j >= c + l : the corner is absorbed, leaving the bare translate;
//   j <= l     : the corner factors through n(b) a(y') k0 with
//                k0 = (1 0; 1 1), one Borel action on the k0 vector;
//   otherwise  : the corner is w^{-1} n(-p^j) w, a four-step chain.
class SupercuspidalEvaluator {
 public:
  // conjugated: the dual vector (same C data, additive character flipped).
  SupercuspidalEvaluator(const EpsilonData& eps, bool conjugated,
                         int translate, int digits);

  const EpsilonData& eps() const { return eps_; }
  std::int64_t prime() const { return eps_.prime(); }
  int conductor() const { return eps_.conductor(); }
  int sigma() const { return sigma_; }
  int translate() const { return l_; }
  int digits() const { return digits_; }
  int invariance_level() const { return eps_.conductor() + l_; }

  // The shell/character expansion of y -> W(a(y) corner_j); j clips to the
  // invariance level.
  const KirillovVector& corner_vector(int j) const;

  cplx at_corner(const Zp& y, int j) const;
  // General point, through the corner decomposition at the invariance level.
  cplx at(const Mat2& g) const;
  cplx at_diag(const Zp& y) const;

 private:
  EpsilonData eps_;
  int sigma_ = 1;
  int l_ = 0;
  int digits_ = 8;
  mutable std::map<int, KirillovVector> cache_;

  KirillovVector build_corner(int j) const;
};

}  // namespace tpl
