// Whittaker functions of induced representations of GL2(Q_p): the closed
// newform/oldform values on the corner cells, a general-point evaluator that
// routes through the corner decomposition, and an independent brute-force
// oracle that computes the defining integral as a certified finite sum.
//
// Three families are covered, each with its dual ("conjugated") partner
// obtained by inverting the characters and flipping the additive character:
//   * Principal: chi1 ramified of conductor m >= 1, chi2 unramified unitary;
//   * Steinberg: the twist of the special representation by an unramified
//     quadratic character, conductor 1;
//   * Spherical: chi ++ chi^{-1} with chi unramified, |chi(p)| inside the
//     open interval (q^{-1/2}, q^{1/2}), conductor 0.
// Steinberg and spherical vectors support a translate parameter l >= 0 (the
// vector moved by a(p^{-l})), which raises the invariance level to c + l.

#pragma once

#include <complex>

#include "characters.hpp"
#include "haar.hpp"
#include "padic.hpp"
#include "zeta.hpp"

namespace tpl {

enum class InducedKind { Principal, Steinberg, Spherical };

struct InducedRepSpec {
  InducedKind kind = InducedKind::Spherical;
  MultChar chi1;  // Principal: the ramified character; St/Sph: the twist
  MultChar chi2;  // Principal: the unramified character; Sph: chi1^{-1}
  int m = 0;      // conductor: Principal >= 1, Steinberg 1, Spherical 0

  std::int64_t prime() const { return chi1.prime(); }
  MultChar central_char() const { return chi1 * chi2; }
  InducedRepSpec conjugated() const;
};

InducedRepSpec make_principal(const MultChar& omega1, const MultChar& omega2);
// sign = omega3(p) in {+1, -1}.
InducedRepSpec make_steinberg(std::int64_t p, int sign);
InducedRepSpec make_spherical(const MultChar& omega3);

// Value of the induced-model newform on a decomposed point
// g = (bA bB; 0 bD) corner_j k: supported on the j = 0 cell for the
// principal family, on everything with a sign/volume split for Steinberg,
// and everywhere for the spherical vector.  The decomposition must have been
// taken at level >= the spec conductor.
cplx eval_newform_induced(const InducedRepSpec& spec,
                          const CornerDecomposition& dec);

class WhittakerEvaluator {
 public:
  // conjugated: evaluate the dual vector (characters inverted, additive
  // character flipped).  translate: the vector moved by a(p^{-l}) (only for
  // Steinberg / spherical).  digits: working unit digits for p-adic points.
  WhittakerEvaluator(InducedRepSpec spec, bool conjugated, int translate,
                     int digits);

  const InducedRepSpec& spec() const { return spec_; }
  int sigma() const { return sigma_; }
  int translate() const { return l_; }
  int digits() const { return digits_; }
  // Right-invariance level of the vector: conductor + translate.
  int invariance_level() const { return spec_.m + l_; }

  // Closed value W(a(y) corner_j), corners taken at any level >= the
  // invariance level (higher j values clip to the invariance level).
  cplx at_corner(const Zp& y, int j) const;

  // General point, through the corner decomposition at the invariance level.
  cplx at(const Mat2& g) const;
  // Whittaker value on the diagonal, W(a(y)).
  cplx at_diag(const Zp& y) const;

  // Independent oracle: the defining integral over the unipotent variable,
  // evaluated as an exact finite sum of certified balls.  Values on certified
  // balls go through decompose_corner + eval_newform_induced; the affine
  // bottom-row forms are used only to certify constancy.
  cplx bruteforce(const Mat2& g) const;

 private:
  InducedRepSpec spec_;  // with conjugation already applied
  int sigma_ = 1;
  int l_ = 0;
  int digits_ = 8;
  MultChar omega_pi_;
  cplx eps_j0_{0.0, 0.0};  // principal j=0 cell constant
  double pref_ = 1.0;      // zeta(2)^{1/2} / zeta(1)
  double parity_ = 1.0;    // chi1(-1); the defining transform of the
                           // canonical section carries this factor, so the
                           // closed table must carry it too

  cplx corner_principal(const Zp& y, int j) const;
  cplx corner_steinberg(const Zp& y, int j) const;
  cplx corner_spherical(const Zp& y, int j) const;

  struct BallContext;
  cplx ball_contribution(const BallContext& ctx, const Zp& x0, int h,
                         int depth) const;
};

// sum over i + i' = n of z^{i - i'} (0 for n < 0).
cplx sigma_sum(const cplx& z, int n);

}  // namespace tpl
