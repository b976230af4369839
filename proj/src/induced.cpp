#include "induced.hpp"

#include <cmath>
#include <stdexcept>

namespace tpl {

namespace {

cplx cpow_int(cplx z, int n) {
  if (n < 0) {
    z = cplx{1.0, 0.0} / z;
    n = -n;
  }
  cplx r{1.0, 0.0};
  while (n) {
    if (n & 1) r *= z;
    z *= z;
    n >>= 1;
  }
  return r;
}

}  // namespace

cplx sigma_sum(const cplx& z, int n) {
  if (n < 0) return {0.0, 0.0};
  cplx total{0.0, 0.0};
  cplx cur = cpow_int(z, n);       // z^{n - 2k}, k = 0
  cplx step = cpow_int(z, -2);
  for (int k = 0; k <= n; ++k) {
    total += cur;
    cur *= step;
  }
  return total;
}

InducedRepSpec InducedRepSpec::conjugated() const {
  InducedRepSpec out = *this;
  out.chi1 = chi1.inverse();
  out.chi2 = chi2.inverse();
  return out;
}

InducedRepSpec make_principal(const MultChar& omega1, const MultChar& omega2) {
  if (omega1.conductor() < 1)
    throw std::domain_error("make_principal: first character must be ramified");
  if (!omega2.is_unramified())
    throw std::domain_error(
        "make_principal: second character must be unramified");
  InducedRepSpec s;
  s.kind = InducedKind::Principal;
  s.chi1 = omega1;
  s.chi2 = omega2;
  s.m = omega1.conductor();
  return s;
}

InducedRepSpec make_steinberg(std::int64_t p, int sign) {
  if (sign != 1 && sign != -1)
    throw std::domain_error("make_steinberg: sign must be +1 or -1");
  MultChar w3 =
      MultChar::unramified(p, 1.0, sign == 1 ? Angle() : Angle(1, 2));
  InducedRepSpec s;
  s.kind = InducedKind::Steinberg;
  s.chi1 = w3;
  s.chi2 = w3;
  s.m = 1;
  return s;
}

InducedRepSpec make_spherical(const MultChar& omega3) {
  if (!omega3.is_unramified())
    throw std::domain_error("make_spherical: character must be unramified");
  double root_q = std::sqrt(static_cast<double>(omega3.prime()));
  if (!(omega3.abs_pi > 1.0 / root_q && omega3.abs_pi < root_q))
    throw std::domain_error(
        "make_spherical: |chi(p)| outside the open unitary-ish interval");
  InducedRepSpec s;
  s.kind = InducedKind::Spherical;
  s.chi1 = omega3;
  s.chi2 = omega3.inverse();
  s.m = 0;
  return s;
}

cplx eval_newform_induced(const InducedRepSpec& spec,
                          const CornerDecomposition& dec) {
  const std::int64_t q = spec.prime();
  const int jeff = std::min(dec.j, spec.m);
  switch (spec.kind) {
    case InducedKind::Principal: {
      if (jeff != 0) return {0.0, 0.0};
      cplx v = spec.chi1.value(dec.bA) * spec.chi2.value(dec.bD);
      int e = dec.bD.valuation() - dec.bA.valuation();
      return v * q_half_pow(q, e);
    }
    case InducedKind::Steinberg: {
      cplx v = spec.chi1.value(dec.bA * dec.bD);
      int e = dec.bD.valuation() - dec.bA.valuation();
      double scale = rat_pow(q, e).to_double();
      if (jeff == 0) return v * scale;
      return -static_cast<double>(q) * v * scale;
    }
    case InducedKind::Spherical: {
      cplx v = spec.chi1.value(dec.bA) * spec.chi2.value(dec.bD);
      int e = dec.bD.valuation() - dec.bA.valuation();
      return v * q_half_pow(q, e);
    }
  }
  throw std::logic_error("eval_newform_induced: unknown kind");
}

WhittakerEvaluator::WhittakerEvaluator(InducedRepSpec spec, bool conjugated,
                                       int translate, int digits)
    : spec_(conjugated ? spec.conjugated() : spec),
      sigma_(conjugated ? -1 : 1),
      l_(translate),
      digits_(digits) {
  if (l_ < 0) throw std::domain_error("WhittakerEvaluator: negative translate");
  if (spec_.kind == InducedKind::Principal && l_ != 0)
    throw std::domain_error(
        "WhittakerEvaluator: translates are only supported for the "
        "conductor <= 1 families");
  const std::int64_t q = spec_.prime();
  omega_pi_ = spec_.central_char();
  pref_ = std::sqrt(zeta_p(q, 2).to_double()) * Rat64{q - 1, q}.to_double();
  if (spec_.kind == InducedKind::Principal) {
    eps_j0_ = epsilon_factor(1.0, spec_.chi1 * spec_.chi2.inverse(), -sigma_);
    parity_ =
        spec_.chi1.unit.value(pow_u64(q, spec_.m) - 1).real() > 0.0 ? 1.0
                                                                    : -1.0;
  }
}

cplx WhittakerEvaluator::at_corner(const Zp& y, int j) const {
  if (j < 0) throw std::domain_error("at_corner: negative corner index");
  if (!y.is_regular()) {
    if (y.is_exact_zero())
      throw std::domain_error("at_corner: diagonal parameter is zero");
    throw PrecisionError("at_corner: diagonal parameter is a bounded zero");
  }
  switch (spec_.kind) {
    case InducedKind::Principal: return corner_principal(y, j);
    case InducedKind::Steinberg: return corner_steinberg(y, j);
    case InducedKind::Spherical: return corner_spherical(y, j);
  }
  throw std::logic_error("at_corner: unknown kind");
}

cplx WhittakerEvaluator::corner_principal(const Zp& y, int j) const {
  const std::int64_t q = spec_.prime();
  const int m = spec_.m;
  const int jeff = std::min(j, m);
  const int v = y.valuation();
  if (jeff == m) {
    if (v < 0) return {0.0, 0.0};
    return parity_ * pref_ * spec_.chi2.value(y) * q_half_pow(q, -v);
  }
  if (jeff == 0) {
    if (v < -m) return {0.0, 0.0};
    return parity_ * pref_ * spec_.chi1.value(y) * q_half_pow(q, -v) *
           psi_angle(sigma_, y).to_complex() * eps_j0_;
  }
  // Interior corner: a single shell survives, with a finite character sum.
  if (v != jeff - m) return {0.0, 0.0};
  const std::uint64_t Mm = pow_u64(q, m);
  const std::uint64_t count = pow_u64(q, m - jeff);
  const std::uint64_t pj = pow_u64(q, jeff);
  AngleAccumulator acc;
  for (std::uint64_t x = 0; x < count; ++x) {
    std::uint64_t u = (1 + x * pj) % Mm;
    Angle a = -spec_.chi1.unit.angle(u);
    if (x != 0) {
      Zp xy = Zp::from_int(q, static_cast<std::int64_t>(x), digits_) * y;
      a = a + psi_angle(-sigma_, xy);
    }
    acc.add(a, Rat64{1});
  }
  return parity_ * pref_ * spec_.chi2.value(y) * q_half_pow(q, -v) *
         rat_pow(q, -(m - jeff)).to_double() * acc.to_complex();
}

cplx WhittakerEvaluator::corner_steinberg(const Zp& y, int j) const {
  const std::int64_t q = spec_.prime();
  const int jeff = std::min(j, 1 + l_);
  const int v = y.valuation();
  const double zeta2_inv_half = 1.0 / std::sqrt(zeta_p(q, 2).to_double());
  if (jeff <= l_) {
    if (v < 2 * jeff - l_ - 1) return {0.0, 0.0};
    Angle ps = psi_angle(sigma_, y.shifted(-jeff));
    cplx w3 = spec_.chi1.value_at(v - l_, 1);
    return -zeta2_inv_half * ps.to_complex() * w3 *
           rat_pow(q, -(v + l_ - 2 * jeff + 1)).to_double();
  }
  if (v < l_) return {0.0, 0.0};
  return zeta2_inv_half * spec_.chi1.value_at(v - l_, 1) *
         rat_pow(q, -(v - l_)).to_double();
}

cplx WhittakerEvaluator::corner_spherical(const Zp& y, int j) const {
  const std::int64_t q = spec_.prime();
  const int jeff = std::min(j, l_);
  const int v = y.valuation();
  if (v < 2 * jeff - l_) return {0.0, 0.0};
  const int n = v + l_ - 2 * jeff;
  cplx z = spec_.chi1.value_at(1, 1);
  cplx csph = std::sqrt(zeta_p(q, 2).to_double()) *
              Rat64{q - 1, q}.to_double() *
              (cplx{1.0, 0.0} - z * z / static_cast<double>(q));
  Angle ps = psi_angle(sigma_, y.shifted(-jeff));
  return csph * ps.to_complex() * q_half_pow(q, -n) * sigma_sum(z, n);
}

cplx WhittakerEvaluator::at(const Mat2& g) const {
  CornerDecomposition dec = decompose_corner(g, invariance_level());
  Zp y = dec.bA / dec.bD;
  Angle psiB = psi_angle(sigma_, dec.bB / dec.bD);
  return omega_pi_.value(dec.bD) * psiB.to_complex() * at_corner(y, dec.j);
}

cplx WhittakerEvaluator::at_diag(const Zp& y) const {
  return at_corner(y, invariance_level());
}

struct WhittakerEvaluator::BallContext {
  Zp A, B;        // gamma(x) = A + B x  (bottom-left of w n(x) g0)
  Zp C, D;        // delta(x) = C + D x  (bottom-right)
  Zp topa, topb;  // constant top row of w n(x) g0
};

cplx WhittakerEvaluator::bruteforce(const Mat2& g) const {
  const std::int64_t p = spec_.prime();
  Mat2 g0 = l_ == 0 ? g : g * mat_a(Zp::from_pow(p, -l_, digits_));
  BallContext ctx;
  ctx.A = -g0.a;
  ctx.B = -g0.c;
  ctx.C = -g0.b;
  ctx.D = -g0.d;
  ctx.topa = g0.c;
  ctx.topb = g0.d;

  // Below the dominance floor every shell integrates to zero: the linear
  // term controls both bottom-row forms with enough digits to freeze the
  // character twist, and what is left is a unit-character times psi over a
  // deep shell, which vanishes.
  const int Rneed = std::max(spec_.m, 1);
  auto threshold = [&](const Zp& cst, const Zp& lin) -> int {
    if (lin.is_exact_zero() || cst.is_exact_zero()) return Zp::kInfinity;
    if (lin.is_bounded() || cst.is_bounded())
      throw PrecisionError("bruteforce: form coefficients lost precision");
    return cst.valuation() - lin.valuation();
  };
  int s_dom = std::min(threshold(ctx.A, ctx.B), threshold(ctx.C, ctx.D));
  int s_floor = std::min(s_dom - Rneed, -Rneed - 1) - 1;

  cplx total = ball_contribution(ctx, Zp::exact_zero(p), 0, 0);
  for (int s = -1; s >= s_floor; --s)
    for (std::int64_t u = 1; u < p; ++u)
      total += ball_contribution(ctx, Zp::from_unit(p, s, u, digits_), s + 1, 0);
  return pref_ * total;
}

cplx WhittakerEvaluator::ball_contribution(const BallContext& ctx, const Zp& x0,
                                           int h, int depth) const {
  const std::int64_t p = spec_.prime();
  if (depth > 64 || h > digits_ + 16)
    throw PrecisionError("bruteforce: ball refinement exceeded working depth");

  Zp gx = ctx.A + ctx.B * x0;
  Zp dx = ctx.C + ctx.D * x0;

  struct FormStatus {
    bool cert = false;  // valuation constant across the ball
    int v = 0;          // that valuation (kInfinity if identically zero)
    int slack = 0;      // pinned unit digits beyond the leading one
    int low = 0;        // guaranteed lower bound on the valuation
  };
  auto assess = [&](const Zp& f0, const Zp& lin) -> FormStatus {
    FormStatus st;
    if (lin.is_exact_zero()) {
      if (f0.is_bounded())
        throw PrecisionError("bruteforce: constant form at a bounded zero");
      st.cert = true;
      st.v = f0.is_exact_zero() ? Zp::kInfinity : f0.valuation();
      st.slack = Zp::kInfinity;
      st.low = st.v;
      return st;
    }
    const int linv = lin.valuation();
    st.low = std::min(f0.vmin(), h + linv);
    if (f0.is_regular() && f0.valuation() < h + linv) {
      st.cert = true;
      st.v = f0.valuation();
      st.slack = h + linv - f0.valuation();
    }
    return st;
  };
  FormStatus G = assess(gx, ctx.B);
  FormStatus Dl = assess(dx, ctx.D);

  // Which bottom-row entry dominates, uniformly over the ball?
  int cell = -1;  // 0: left (j = 0 cell), 1: right dominates strictly
  if (G.cert && G.v <= Dl.low)
    cell = 0;
  else if (Dl.cert && G.low > Dl.v)
    cell = 1;

  bool ready = false;
  if (cell == 0) {
    // The j = 0 value reads the unit of gamma through a level-m character
    // for the principal family; the others only need its valuation.
    int need = spec_.kind == InducedKind::Principal ? spec_.m : 1;
    ready = G.slack >= need;
  } else if (cell == 1) {
    ready = true;
  }

  if (!ready) {
    cplx sum{0.0, 0.0};
    for (std::int64_t i = 0; i < p; ++i) {
      Zp child = x0 + Zp::from_int(p, i, digits_).shifted(h);
      sum += ball_contribution(ctx, child, h + 1, depth + 1);
    }
    return sum;
  }

  if (spec_.kind == InducedKind::Principal && cell == 1) return {0.0, 0.0};
  // On a certified ball the integrand is value * psi^{-sigma}(x); psi
  // integrates to zero over any ball strictly coarser than Z_p.
  if (h < 0) return {0.0, 0.0};

  Mat2 Mx{ctx.topa, ctx.topb, gx, dx};
  CornerDecomposition dec = decompose_corner(Mx, spec_.m);
  cplx val = eval_newform_induced(spec_, dec);
  Angle ps = psi_angle(-sigma_, x0);
  return val * ps.to_complex() * rat_pow(p, -h).to_double();
}

}  // namespace tpl
