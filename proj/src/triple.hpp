// Local Rankin-Selberg integrals for a triple of GL2(Q_p) representations
//
//   pi1 = chi1 ++ chi2 (chi1 ramified of conductor m, chi2 unramified),
//   pi2 = the dual flag of pi1,
//   pi3 = a Steinberg twist, an unramified principal series, or a
//         supercuspidal with trivial central character,
//
// and the normalized local constant built from them.  The bilinear form is
// computed from the corner-weight measure on K,
//
//   ell = zeta(1)^{1/2} sum_j A_j sum_r q^r
//           int_{v(y)=r} phi1(a(y) c_j) W2(a(y) c_j) W3(a(y) c_j) d^x y,
//
// with phi1 the induced-model section of pi1, W2 the dual Whittaker function
// of pi1 and W3 the Whittaker function of pi3 translated by a(p^{-l}); the
// dual form ell~ uses the conjugate section and flipped additive characters.
// Shell sums run over the exact support, margins below the support are
// spot-checked to vanish, and infinite tails are closed by recurrence
// locking.  The normalized constant divides ell * ell~ by the newform norms
// and the standard L-factor normalization; its closed value is a rational
// monomial in 1/q that the bruteforce route must reproduce.
//
// The same constant has a second, independent route for the supercuspidal
// case: the weighted double integral of the three matrix coefficients
// Phi_i(g) = <pi_i(g) W_i, W_i~> / <W_i, W_i~> over the Borel coordinates,
// assembled here from t-integral formulas that are themselves exact finite
// sums (geometric series for the principal pair, a G-function sum for the
// supercuspidal factor).

#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <utility>

#include "characters.hpp"
#include "induced.hpp"
#include "kirillov.hpp"
#include "padic.hpp"

namespace tpl {

enum class TripleKind { Steinberg, Spherical, Supercuspidal };
enum class Side { Plain, Tilde };

struct TripleSpec {
  std::int64_t p = 2;
  int m = 1;        // conductor of omega1, >= 1
  MultChar omega1;  // ramified of conductor m, unit modulus
  MultChar omega2;  // unramified unitary
  TripleKind kind = TripleKind::Steinberg;
  // Steinberg: unramified quadratic twist; Spherical: unramified with
  // |omega3(p)| strictly between q^{-1/2} and q^{1/2}.  Unused for
  // supercuspidal pi3.
  MultChar omega3;
  int c = 0;  // supercuspidal conductor, 2 <= c <= m
  std::shared_ptr<const EpsilonData> eps;  // supercuspidal Weyl constants
  // Supercuspidal dichotomy selector: whether pi3 is a base-change lift from
  // the unramified quadratic extension (it changes only the closed adjoint
  // L-factor, never the bilinear forms).
  bool unramified_flag = false;
  int l1 = 0;  // translate of the plain side
  int l2 = 0;  // translate of the dual side

  int conductor3() const;
  // Working unit digits: enough for every character level, additive level,
  // and shell depth the grids reach, capped by the 2^60 representable range.
  int working_digits() const;
  // Throws std::invalid_argument on any ill-formed combination.
  void validate() const;
};

TripleSpec make_steinberg_triple(std::int64_t p, int m, const MultChar& omega1,
                                 const MultChar& omega2, int sign3, int l1,
                                 int l2);
TripleSpec make_spherical_triple(std::int64_t p, int m, const MultChar& omega1,
                                 const MultChar& omega2,
                                 const MultChar& omega3, int l1, int l2);
TripleSpec make_supercuspidal_triple(std::int64_t p, int m,
                                     const MultChar& omega1,
                                     const MultChar& omega2,
                                     std::shared_ptr<const EpsilonData> eps,
                                     bool unramified_flag, int l1, int l2);

// Largest translate for which the closed normalized constant applies:
// m - 1 (Steinberg), m (spherical), m - c (supercuspidal).
int max_translate(const TripleSpec& spec);

// 1 / (1 - q^{-s}).
cplx zeta_s(std::int64_t q, double s);
// Standard L-factor of a character: 1 / (1 - chi(p) q^{-s}) when chi is
// unramified, 1 otherwise.
cplx unramified_L(const MultChar& chi, double s);
// Adjoint L-factor of pi_{which} (which in {1, 2, 3}).
cplx adjoint_L(const TripleSpec& spec, int which, double s);
// Triple-product L-factor of pi1 x pi2 x pi3 at s (the three conductors make
// every ramified part trivial).
cplx triple_L(const TripleSpec& spec, double s);

struct Norms {
  cplx n1{0.0, 0.0};
  cplx n2{0.0, 0.0};
  cplx n3{0.0, 0.0};
};

struct IPrimePair {
  cplx bruteforce{0.0, 0.0};
  cplx closed{0.0, 0.0};
  double abs_err = 0.0;
};

class TripleEngine {
 public:
  // Validates the spec; throws std::invalid_argument if ill-formed.
  explicit TripleEngine(TripleSpec spec);

  const TripleSpec& spec() const { return spec_; }

  // The bilinear form at translate l (cached per side and translate, so a
  // grid over (l1, l2) costs one computation per distinct side/translate).
  cplx ell(Side side, int l) const;

  // Newform norms <W_i, W_i~> at translate 0: closed per-shell values are
  // cross-checked against the brute-force Whittaker integrals on the head
  // shells, then summed with a locked tail.
  Norms norms() const;

  // ell(plain, l1) * ell(dual, l2).
  cplx local_I(int l1, int l2) const;

  // The normalized constant: bruteforce route versus the closed rational
  // value.  Throws std::domain_error when a translate exceeds
  // max_translate(spec) unless extended is set (the closed value is reported
  // regardless; outside the proven range the routes need not agree).
  IPrimePair local_I_prime(int l1, int l2, bool extended = false) const;

  cplx i_prime_closed() const;

 private:
  TripleSpec spec_;
  InducedRepSpec pr_;  // principal data of pi1
  mutable std::map<std::pair<int, int>, cplx> ell_cache_;
  mutable std::optional<Norms> norms_cache_;

  cplx ell_compute(Side side, int l) const;
  cplx pair_norm(const WhittakerEvaluator& plain,
                 const WhittakerEvaluator& dual) const;
  cplx pair_norm_supercuspidal() const;
};

// One-call convenience used by the command-line entry point.
IPrimePair local_I_prime(const TripleSpec& spec, bool extended = false);

// ---------------------------------------------------------------------------
// Matrix-coefficient route (supercuspidal pi3 only).
//
// Phi_pi(g) = T(g) / T(1) with T(g) = int_{F^x} W(a(t) g) W~(a(t)) d^x t.
// Both T's below are exact symbolic sums: the corner decomposition of g is
// independent of the torus variable, so every t-integral collapses to
// geometric series and G-function values.

// T(g) for the principal pair: `plain` supplies the characters and additive
// sign of W, and W~ is its dual (inverse characters, flipped sign).
cplx mc_principal_tsum(const WhittakerEvaluator& plain, const Mat2& g);

// Phi for the principal pair straight from the tabulated supports, evaluated
// at g = n(x) a(y) c_j; the tsum route must match it everywhere.
cplx mc_principal_table(const InducedRepSpec& pr, const Zp& x, const Zp& y,
                        int j);

// T(g) for the supercuspidal pair (dual = same Weyl constants, flipped
// additive character, same translate).
cplx mc_supercuspidal_tsum(const SupercuspidalEvaluator& ev,
                           const SupercuspidalEvaluator& ev_dual,
                           const Mat2& g);

// The full double integral sum_j A_j int int Phi1 Phi2 Phi3 (n(x) a(y) c_j)
// |y|^{-1} d^x y dx.  Requires a supercuspidal spec with c < 4 and l1 == l2
// (the tabulated supports cover exactly that range); throws
// std::domain_error otherwise.
cplx matrix_coefficient_I(const TripleSpec& spec);

}  // namespace tpl
