// Haar measure on Q_p, Q_p^x, and GL2(Z_p), normalized so that Z_p has
// additive volume 1, the units have multiplicative volume 1, and the maximal
// compact has volume 1.
//
// Integrals over a valuation shell are exact finite sums over unit classes at
// a caller-chosen depth; integrals over the maximal compact reduce to the
// weighted corner sum for right-K1(p^m)-invariant integrands, with a
// stochastic invariance guard so a wrong invariance level fails loudly
// instead of silently producing a plausible number.

#pragma once

#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "angle.hpp"
#include "padic.hpp"
#include "rational.hpp"

namespace tpl {

using ZpFn = std::function<cplx(const Zp&)>;

// Integral of f over the shell {v(x) = r} against dx (vol(Z_p) = 1),
// sampling one representative per unit class mod p^depth; exact whenever f is
// constant on those classes.
cplx integrate_additive_shell(std::int64_t p, int r, int depth, const ZpFn& f);

// Same shell against d^x (vol(units) = 1).
cplx integrate_mult_shell(std::int64_t p, int r, int depth, const ZpFn& f);

// Exact values of the additive-character shell integrals, both as the closed
// form and as a from-scratch root-of-unity sum at any valid depth.
Rat64 addchar_additive_closed(std::int64_t p, int m);
Rat64 addchar_additive_exact(std::int64_t p, int m, int depth);
Rat64 addchar_mult_closed(std::int64_t p, int vb);
Rat64 addchar_mult_exact(std::int64_t p, int vb, int depth);

// Weights for the lower-corner representatives (1 0; p^j 1), j = 0..m, in
// the corner-and-torus decomposition behind the triple-product integrals.
// For 0 <= j < m the weight is the Haar volume of the subset of K whose
// bottom-left entry has valuation exactly j; the top corner carries q times
// its plain cell volume, the rebalancing that lets the corner sum stand in
// for the full integral on the newvector integrands (big-cell classes are
// evaluated at the bottom corner, and the top corner absorbs the
// difference).  Level 0 degenerates to the single weight 1.
std::vector<Rat64> corner_weights(std::int64_t q, int m);

// Integral over K of a right-K1(p^m)-invariant f, as an exact finite sum
// over coset representatives: first-column classes of K crossed with the
// unit quotient that separates K1 inside the congruence subgroup.  Before
// trusting the sum, f is probed at 8 random points g * k with k in K1(p^m);
// a relative invariance defect above 1e-12 throws.  The enumeration grows
// like p^(2m-1), so this is a cross-checking tool, not a production path.
cplx integrate_K(std::int64_t p, int m, int digits, std::mt19937_64& rng,
                 const std::function<cplx(const Mat2&)>& f);

// Analytic continuation of a shell sum: given the trailing terms of a series
// whose tail satisfies a short linear recurrence (geometric decay, or the
// order <= 4 products that show up in spherical sums), fit the recurrence,
// verify it across the window, check the roots are inside the unit circle,
// and return the exact sum of all terms after the last one supplied.
struct TailLock {
  cplx tail{0.0, 0.0};
  int order = 0;
  bool all_zero = false;
};
std::optional<TailLock> tail_lock(const std::vector<cplx>& terms);

}  // namespace tpl
