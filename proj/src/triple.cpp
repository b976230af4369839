#include "triple.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "haar.hpp"
#include "zeta.hpp"

namespace tpl {
namespace {

// Shells whose recurrence tail is locked start this far past the last
// support/conductor scale, and the lock window must accommodate an order-4
// fit (>= 2*4 + 4 terms).
constexpr int kTailWindow = 12;

int max_digits_for(std::int64_t p) {
  int k = 0;
  unsigned __int128 v = 1;
  const unsigned __int128 cap = static_cast<unsigned __int128>(1) << 60;
  while (v * static_cast<unsigned __int128>(p) <= cap) {
    v *= static_cast<unsigned __int128>(p);
    ++k;
  }
  return k;
}

// Deterministic per-computation stream so probe points never depend on call
// order or on any caller-visible seed.
std::mt19937_64 probe_rng(const TripleSpec& s, int side, int l,
                          const char* tag) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull;
    h *= 0x100000001b3ull;
  };
  mix(static_cast<std::uint64_t>(s.p));
  mix(static_cast<std::uint64_t>(s.m));
  mix(static_cast<std::uint64_t>(s.kind));
  mix(static_cast<std::uint64_t>(s.c));
  mix(static_cast<std::uint64_t>(side));
  mix(static_cast<std::uint64_t>(l + 7));
  for (const char* t = tag; *t; ++t) mix(static_cast<std::uint64_t>(*t));
  return std::mt19937_64(h);
}

Zp random_unit_shell(std::int64_t p, int v, int digits,
                     std::mt19937_64& rng) {
  int k = std::min(digits, 18);
  std::uint64_t pk = 1;
  for (int i = 0; i < k; ++i) pk *= static_cast<std::uint64_t>(p);
  std::uint64_t u = rng() % pk;
  if (u % static_cast<std::uint64_t>(p) == 0) u = (u + 1) % pk;
  if (u == 0) u = 1;
  return Zp::from_unit(p, v, static_cast<std::int64_t>(u), digits);
}

Mat2 random_k1(std::int64_t p, int level, int digits, std::mt19937_64& rng) {
  Zp a = random_unit_shell(p, 0, digits, rng);
  Zp b = Zp::from_int(p, static_cast<std::int64_t>(rng() % 997), digits);
  Zp pl = Zp::from_pow(p, level, digits);
  Zp c = pl * Zp::from_int(p, static_cast<std::int64_t>(rng() % 997), digits);
  Zp d = Zp::from_int(p, 1, digits) +
         pl * Zp::from_int(p, static_cast<std::int64_t>(rng() % 997), digits);
  return Mat2{a, b, c, d};
}

// v(x) >= bound, treating an exact zero as +infinity; an undetermined
// bounded zero is a hard error rather than a silent guess.
bool val_at_least(const Zp& x, int bound) {
  if (x.is_exact_zero()) return true;
  if (x.is_regular()) return x.valuation() >= bound;
  if (x.vmin() >= bound) return true;
  throw PrecisionError("triple: valuation comparison needs more digits");
}

// PRECISION_FLOOR, when set to a positive integer, raises the minimum number
// of working unit digits (still capped by the representable range).
int precision_floor_env() {
  static const int floor_digits = [] {
    const char* s = std::getenv("PRECISION_FLOOR");
    if (!s || !*s) return 0;
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0' || v < 0 || v > 200) return 0;
    return static_cast<int>(v);
  }();
  return floor_digits;
}

int digits_for(const TripleSpec& s, int l) {
  int want = 2 * (s.m + s.conductor3() + l) + 8;
  want = std::max(want, precision_floor_env());
  return std::min(want, max_digits_for(s.p));
}

cplx unit_char_value(const UnitChar& nu, const Zp& y) {
  if (nu.is_trivial()) return cplx{1.0, 0.0};
  return nu.value(y.unit_mod(nu.level()));
}

}  // namespace

// ---------------------------------------------------------------------------
// Spec

int TripleSpec::conductor3() const {
  switch (kind) {
    case TripleKind::Steinberg:
      return 1;
    case TripleKind::Spherical:
      return 0;
    case TripleKind::Supercuspidal:
      return c;
  }
  return 0;
}

int TripleSpec::working_digits() const {
  return digits_for(*this, std::max(l1, l2));
}

void TripleSpec::validate() const {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("triple spec: " + msg);
  };
  if (p < 2) fail("p must be at least 2");
  for (std::int64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) fail("p must be prime");
  if (m < 1) fail("the ramified conductor must be at least 1");
  if (omega1.prime() != p || omega2.prime() != p)
    fail("character primes must match p");
  if (omega1.conductor() != m) fail("omega1 must have conductor m");
  if (!omega1.is_unitary()) fail("omega1 must be unitary");
  if (!omega2.is_unramified() || !omega2.is_unitary())
    fail("omega2 must be unramified unitary");
  if (l1 < 0 || l2 < 0) fail("translates must be nonnegative");
  switch (kind) {
    case TripleKind::Steinberg: {
      if (omega3.prime() != p) fail("omega3 must live over p");
      if (!omega3.is_unramified()) fail("the twist must be unramified");
      cplx v = omega3.value_at(1, 1);
      if (std::abs(v.imag()) > 1e-12 ||
          std::abs(std::abs(v.real()) - 1.0) > 1e-12)
        fail("the twist must be quadratic");
      break;
    }
    case TripleKind::Spherical: {
      if (omega3.prime() != p) fail("omega3 must live over p");
      if (!omega3.is_unramified()) fail("omega3 must be unramified");
      double a = std::abs(omega3.value_at(1, 1));
      double rq = std::sqrt(static_cast<double>(p));
      if (!(a > 1.0 / rq && a < rq))
        fail("the spherical parameter must satisfy q^{-1/2} < |z| < q^{1/2}");
      break;
    }
    case TripleKind::Supercuspidal: {
      if (!eps) fail("supercuspidal data missing");
      if (eps->prime() != p) fail("supercuspidal data must live over p");
      if (c != eps->conductor())
        fail("supercuspidal conductor must match its data");
      if (c < 2 || c > m)
        fail("the supercuspidal conductor must satisfy 2 <= c <= m");
      break;
    }
  }
}

TripleSpec make_steinberg_triple(std::int64_t p, int m, const MultChar& omega1,
                                 const MultChar& omega2, int sign3, int l1,
                                 int l2) {
  TripleSpec s;
  s.p = p;
  s.m = m;
  s.omega1 = omega1;
  s.omega2 = omega2;
  s.kind = TripleKind::Steinberg;
  s.omega3 = MultChar::unramified(p, 1.0,
                                  sign3 >= 0 ? Angle() : Angle(1, 2));
  s.l1 = l1;
  s.l2 = l2;
  s.validate();
  return s;
}

TripleSpec make_spherical_triple(std::int64_t p, int m, const MultChar& omega1,
                                 const MultChar& omega2,
                                 const MultChar& omega3, int l1, int l2) {
  TripleSpec s;
  s.p = p;
  s.m = m;
  s.omega1 = omega1;
  s.omega2 = omega2;
  s.kind = TripleKind::Spherical;
  s.omega3 = omega3;
  s.l1 = l1;
  s.l2 = l2;
  s.validate();
  return s;
}

TripleSpec make_supercuspidal_triple(std::int64_t p, int m,
                                     const MultChar& omega1,
                                     const MultChar& omega2,
                                     std::shared_ptr<const EpsilonData> eps,
                                     bool unramified_flag, int l1, int l2) {
  TripleSpec s;
  s.p = p;
  s.m = m;
  s.omega1 = omega1;
  s.omega2 = omega2;
  s.kind = TripleKind::Supercuspidal;
  s.c = eps ? eps->conductor() : 0;
  s.eps = std::move(eps);
  s.unramified_flag = unramified_flag;
  s.l1 = l1;
  s.l2 = l2;
  s.validate();
  return s;
}

int max_translate(const TripleSpec& spec) {
  switch (spec.kind) {
    case TripleKind::Steinberg:
      return spec.m - 1;
    case TripleKind::Spherical:
      return spec.m;
    case TripleKind::Supercuspidal:
      return spec.m - spec.c;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// L-factors

cplx zeta_s(std::int64_t q, double s) {
  return 1.0 / (1.0 - std::pow(static_cast<double>(q), -s));
}

cplx unramified_L(const MultChar& chi, double s) {
  if (!chi.is_unramified()) return cplx{1.0, 0.0};
  cplx zp = chi.value_at(1, 1);
  return 1.0 / (1.0 - zp * std::pow(static_cast<double>(chi.prime()), -s));
}

cplx adjoint_L(const TripleSpec& spec, int which, double s) {
  if (which == 1 || which == 2) {
    // chi1 ++ chi2 with chi1 chi2^{-1} ramified: only the zeta factor
    // survives.
    return zeta_s(spec.p, s);
  }
  if (which != 3) throw std::invalid_argument("adjoint_L: which must be 1..3");
  switch (spec.kind) {
    case TripleKind::Steinberg:
      return zeta_s(spec.p, s + 1.0);
    case TripleKind::Spherical: {
      MultChar sq = spec.omega3 * spec.omega3;
      return zeta_s(spec.p, s) * unramified_L(sq, s) *
             unramified_L(sq.inverse(), s);
    }
    case TripleKind::Supercuspidal:
      // Trivial unless the representation comes from the unramified
      // quadratic extension, which contributes the sign character.
      if (spec.unramified_flag)
        return 1.0 / (1.0 + std::pow(static_cast<double>(spec.p), -s));
      return cplx{1.0, 0.0};
  }
  return cplx{1.0, 0.0};
}

cplx triple_L(const TripleSpec& spec, double s) {
  switch (spec.kind) {
    case TripleKind::Steinberg: {
      cplx f = unramified_L(spec.omega3, s + 0.5);
      return f * f;
    }
    case TripleKind::Spherical: {
      cplx f = unramified_L(spec.omega3, s);
      cplx g = unramified_L(spec.omega3.inverse(), s);
      return f * f * g * g;
    }
    case TripleKind::Supercuspidal:
      return cplx{1.0, 0.0};
  }
  return cplx{1.0, 0.0};
}

// ---------------------------------------------------------------------------
// Engine

TripleEngine::TripleEngine(TripleSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  pr_ = make_principal(spec_.omega1, spec_.omega2);
}

cplx TripleEngine::ell(Side side, int l) const {
  if (l < 0) throw std::invalid_argument("ell: negative translate");
  auto key = std::make_pair(side == Side::Tilde ? 1 : 0, l);
  auto it = ell_cache_.find(key);
  if (it != ell_cache_.end()) return it->second;
  cplx v = ell_compute(side, l);
  ell_cache_.emplace(key, v);
  return v;
}

cplx TripleEngine::ell_compute(Side side, int l) const {
  const TripleSpec& S = spec_;
  const std::int64_t p = S.p;
  const int m = S.m;
  const int c3 = S.conductor3();
  const int digits = digits_for(S, l);
  const bool dual = (side == Side::Tilde);

  // The section of pi1 carries no additive character; the dual Whittaker
  // vector of pi1 and the pi3 vector carry opposite additive signs, which is
  // what makes the diagonal sum converge shell by shell.
  const InducedRepSpec sec = dual ? pr_.conjugated() : pr_;
  WhittakerEvaluator w2(pr_, /*conjugated=*/!dual, /*translate=*/0, digits);

  std::optional<WhittakerEvaluator> w3i;
  std::optional<SupercuspidalEvaluator> w3s;
  switch (S.kind) {
    case TripleKind::Steinberg: {
      int sign3 = S.omega3.value_at(1, 1).real() > 0.0 ? 1 : -1;
      w3i.emplace(make_steinberg(p, sign3), dual, l, digits);
      break;
    }
    case TripleKind::Spherical:
      w3i.emplace(make_spherical(S.omega3), dual, l, digits);
      break;
    case TripleKind::Supercuspidal:
      w3s.emplace(*S.eps, dual, l, digits);
      break;
  }

  auto w3_corner = [&](const Zp& y, int j) -> cplx {
    return w3s ? w3s->at_corner(y, j) : w3i->at_corner(y, j);
  };
  auto w3_at = [&](const Mat2& g) -> cplx {
    return w3s ? w3s->at(g) : w3i->at(g);
  };

  const int M = std::max({m, c3 + l, 1});
  const std::vector<Rat64> weights = corner_weights(p, M);
  std::mt19937_64 rng = probe_rng(S, dual ? 1 : 0, l, "ell");

  // Support and sensitivity data for the shell sum at corner j.
  struct CornerSupport {
    int lo = 0;
    std::optional<int> hi;
    int levels = 0;  // unit-character sensitivity of the pi3 factor
    int freq3 = 0;   // additive level of the pi3 factor
    bool empty = false;
  };
  auto support3 = [&](int j) -> CornerSupport {
    CornerSupport s;
    if (w3s) {
      const KirillovVector& vec = w3s->corner_vector(j);
      if (vec.empty()) {
        s.empty = true;
        return s;
      }
      s.lo = vec.shells().begin()->first;
      s.hi = vec.shells().rbegin()->first;
      s.levels = vec.max_level();
      s.freq3 = 0;  // additive parts are already re-expanded into characters
    } else if (S.kind == TripleKind::Steinberg) {
      int jc = std::min(j, 1 + l);
      s.lo = jc <= l ? 2 * jc - l - 1 : l;
      s.freq3 = jc;
    } else {
      int jc = std::min(j, l);
      s.lo = 2 * jc - l;
      s.freq3 = jc;
    }
    return s;
  };

  std::vector<Mat2> corners;
  corners.reserve(static_cast<size_t>(std::max({m, c3 + l, 1})) + 1);
  for (int j = 0; j <= std::max({m, c3 + l, 1}); ++j)
    corners.push_back(mat_corner(p, j, digits));

  auto integrand = [&](const Zp& y, int j) -> cplx {
    cplx f1 = eval_newform_induced(
        sec, decompose_corner(mat_a(y) * corners[static_cast<size_t>(j)], m));
    if (f1 == cplx{0.0, 0.0}) return f1;
    return f1 * w2.at_corner(y, j) * w3_corner(y, j);
  };

  cplx total{0.0, 0.0};
  double scale = 0.0;

  for (int j = 0; j <= M; ++j) {
    const double aj = weights[static_cast<size_t>(j)].to_double();

    if (j >= 1) {
      // The principal section vanishes on every corner cell above the
      // bottom one; verify at scattered probe points, then skip the corner.
      bool all_zero = true;
      for (int t = 0; t < 4 && all_zero; ++t) {
        int rv = static_cast<int>(rng() % static_cast<std::uint64_t>(
                     2 * (m + l) + 3)) -
                 (m + l + 1);
        Zp y = random_unit_shell(p, rv, digits, rng);
        cplx v = eval_newform_induced(
            sec,
            decompose_corner(mat_a(y) * corners[static_cast<size_t>(j)], m));
        if (v != cplx{0.0, 0.0}) all_zero = false;
      }
      if (all_zero) continue;
    }

    CornerSupport s3 = support3(j);
    if (s3.empty) continue;

    // Dual Whittaker support at this corner.
    const int jeff2 = std::min(j, m);
    int lo = std::max(jeff2 == m ? 0 : jeff2 - m, s3.lo);
    std::optional<int> hi = s3.hi;
    if (0 < jeff2 && jeff2 < m) {
      // The middle cell lives on a single shell.
      lo = std::max(lo, jeff2 - m);
      hi = hi ? std::min(*hi, jeff2 - m) : jeff2 - m;
    }
    if (hi && *hi < lo) continue;

    auto term = [&](int r) -> cplx {
      int depth = std::max({m, s3.levels, 1, std::max(0, -r),
                            std::max(0, s3.freq3 - r)}) +
                  1;
      if (depth > digits)
        throw std::logic_error("ell: shell depth exceeds working digits");
      cplx shell = integrate_mult_shell(
          p, r, depth, [&](const Zp& y) { return integrand(y, j); });
      return rat_pow(p, r).to_double() * shell;
    };

    cplx corner{0.0, 0.0};
    const int r_stop = m + c3 + l + 3;
    if (hi) {
      for (int r = lo; r <= *hi; ++r) {
        cplx t = term(r);
        scale = std::max(scale, std::abs(t));
        corner += t;
      }
    } else {
      std::vector<cplx> window;
      for (int r = lo; r <= r_stop + kTailWindow; ++r) {
        cplx t = term(r);
        scale = std::max(scale, std::abs(t));
        if (r <= r_stop)
          corner += t;
        else
          window.push_back(t);
      }
      auto lock = tail_lock(window);
      if (!lock)
        throw std::runtime_error(
            "ell: shell tail failed to stabilize to a short recurrence");
      for (const cplx& t : window) corner += t;
      corner += lock->tail;
    }

    // Margin shells just outside the support must vanish identically.
    const double tol = 1e-10 * (1.0 + scale);
    auto check_margin = [&](int r) {
      for (int t = 0; t < 8; ++t) {
        Zp y = random_unit_shell(p, r, digits, rng);
        if (std::abs(integrand(y, j)) > tol)
          throw std::runtime_error(
              "ell: nonzero value outside the derived shell support");
      }
    };
    check_margin(lo - 1);
    check_margin(lo - 2);
    if (hi) {
      check_margin(*hi + 1);
      check_margin(*hi + 2);
    }

    total += aj * corner;
  }

  // Right-invariance probe at the surviving corner: all three factors must
  // be constant on cosets of K1(p^M).
  {
    CornerSupport s0 = support3(0);
    if (!s0.empty) {
      int r0 = std::max(std::min(0, m) - m, s0.lo);
      Zp y0 = random_unit_shell(p, r0, digits, rng);
      Mat2 base = mat_a(y0) * mat_corner(p, 0, digits);
      cplx b1 = eval_newform_induced(sec, decompose_corner(base, m));
      cplx b2 = w2.at(base);
      cplx b3 = w3_at(base);
      double ref = std::abs(b1) + std::abs(b2) + std::abs(b3) + 1.0;
      for (int t = 0; t < 3; ++t) {
        Mat2 g = base * random_k1(p, M, digits, rng);
        cplx d1 = eval_newform_induced(sec, decompose_corner(g, m)) - b1;
        cplx d2 = w2.at(g) - b2;
        cplx d3 = w3_at(g) - b3;
        if (std::abs(d1) + std::abs(d2) + std::abs(d3) > 1e-9 * ref)
          throw std::runtime_error(
              "ell: integrand is not right-invariant at the corner level");
      }
    }
  }

  return std::sqrt(zeta_p(p, 1).to_double()) * total;
}

// ---------------------------------------------------------------------------
// Norms

cplx TripleEngine::pair_norm(const WhittakerEvaluator& plain,
                             const WhittakerEvaluator& dual) const {
  const std::int64_t p = spec_.p;
  const int digits = plain.digits();
  const int depth = std::max(plain.invariance_level(), 1) + 1;
  std::mt19937_64 rng = probe_rng(spec_, 2, plain.translate(), "norm");

  auto closed_term = [&](int r) -> cplx {
    return integrate_mult_shell(p, r, depth, [&](const Zp& y) {
      return plain.at_diag(y) * dual.at_diag(y);
    });
  };

  // The diagonal pairing is supported on v >= 0; the two shells below must
  // vanish pointwise.
  for (int r = -2; r <= -1; ++r) {
    for (int t = 0; t < 8; ++t) {
      Zp y = random_unit_shell(p, r, digits, rng);
      if (std::abs(plain.at_diag(y) * dual.at_diag(y)) > 1e-12)
        throw std::runtime_error("norm: nonzero pairing below the support");
    }
  }

  const int head_end = spec_.m + spec_.conductor3() + 4;
  cplx total{0.0, 0.0};
  for (int r = 0; r <= head_end; ++r) {
    total += closed_term(r);
    // Cross-check the closed diagonal values against the defining integral
    // on the shells that carry essentially all of the mass.
    if (r <= spec_.m + 2) {
      for (int t = 0; t < 2; ++t) {
        Zp y = random_unit_shell(p, r, digits, rng);
        cplx ca = plain.at_diag(y);
        cplx cb = plain.bruteforce(mat_a(y));
        if (std::abs(ca - cb) > 1e-9 * (1.0 + std::abs(ca)))
          throw std::runtime_error(
              "norm: closed diagonal value disagrees with the defining "
              "integral");
        cplx da = dual.at_diag(y);
        cplx db = dual.bruteforce(mat_a(y));
        if (std::abs(da - db) > 1e-9 * (1.0 + std::abs(da)))
          throw std::runtime_error(
              "norm: closed diagonal value disagrees with the defining "
              "integral");
      }
    }
  }
  std::vector<cplx> window;
  for (int r = head_end + 1; r <= head_end + kTailWindow; ++r)
    window.push_back(closed_term(r));
  auto lock = tail_lock(window);
  if (!lock)
    throw std::runtime_error("norm: diagonal tail failed to stabilize");
  for (const cplx& t : window) total += t;
  total += lock->tail;
  return total;
}

cplx TripleEngine::pair_norm_supercuspidal() const {
  const std::int64_t p = spec_.p;
  const int digits = digits_for(spec_, 0);
  SupercuspidalEvaluator plain(*spec_.eps, false, 0, digits);
  SupercuspidalEvaluator dual(*spec_.eps, true, 0, digits);
  const int depth = std::max(spec_.c, 1) + 1;
  // The diagonal expansion is a finite set of shells; sum a window wide
  // enough to cover it together with vanishing margins on both sides.
  cplx total{0.0, 0.0};
  for (int r = -2; r <= spec_.c + 4; ++r) {
    total += integrate_mult_shell(p, r, depth, [&](const Zp& y) {
      return plain.at_diag(y) * dual.at_diag(y);
    });
  }
  return total;
}

Norms TripleEngine::norms() const {
  if (norms_cache_) return *norms_cache_;
  const int digits = digits_for(spec_, 0);
  Norms n;
  WhittakerEvaluator w1(pr_, false, 0, digits);
  WhittakerEvaluator w1d(pr_, true, 0, digits);
  n.n1 = pair_norm(w1, w1d);
  n.n2 = pair_norm(w1d, w1);
  switch (spec_.kind) {
    case TripleKind::Steinberg: {
      int sign3 = spec_.omega3.value_at(1, 1).real() > 0.0 ? 1 : -1;
      InducedRepSpec st = make_steinberg(spec_.p, sign3);
      WhittakerEvaluator w3(st, false, 0, digits);
      WhittakerEvaluator w3d(st, true, 0, digits);
      n.n3 = pair_norm(w3, w3d);
      break;
    }
    case TripleKind::Spherical: {
      InducedRepSpec sph = make_spherical(spec_.omega3);
      WhittakerEvaluator w3(sph, false, 0, digits);
      WhittakerEvaluator w3d(sph, true, 0, digits);
      n.n3 = pair_norm(w3, w3d);
      break;
    }
    case TripleKind::Supercuspidal:
      n.n3 = pair_norm_supercuspidal();
      break;
  }
  norms_cache_ = n;
  return n;
}

// ---------------------------------------------------------------------------
// The normalized constant

cplx TripleEngine::local_I(int l1, int l2) const {
  return ell(Side::Plain, l1) * ell(Side::Tilde, l2);
}

cplx TripleEngine::i_prime_closed() const {
  Rat64 qm = rat_pow(spec_.p, -spec_.m);
  Rat64 onep = Rat64{1} + Rat64{1, spec_.p};
  Rat64 value = qm;
  switch (spec_.kind) {
    case TripleKind::Steinberg:
      value = qm * onep;
      break;
    case TripleKind::Spherical:
      value = qm;
      break;
    case TripleKind::Supercuspidal:
      value = spec_.unramified_flag ? qm : qm * onep;
      break;
  }
  return cplx{value.to_double(), 0.0};
}

IPrimePair TripleEngine::local_I_prime(int l1, int l2, bool extended) const {
  if (l1 < 0 || l2 < 0)
    throw std::invalid_argument("local_I_prime: negative translate");
  const int lmax = max_translate(spec_);
  if (!extended && (l1 > lmax || l2 > lmax))
    throw std::domain_error(
        "local_I_prime: translate outside the closed-form range");
  Norms n = norms();
  cplx lnorm = adjoint_L(spec_, 1, 1.0) * adjoint_L(spec_, 2, 1.0) *
               adjoint_L(spec_, 3, 1.0);
  Rat64 z2 = zeta_p(spec_.p, 2);
  cplx denom = cplx{(z2 * z2).to_double(), 0.0} * triple_L(spec_, 0.5);
  cplx brute = lnorm / denom * local_I(l1, l2) / (n.n1 * n.n2 * n.n3);
  cplx closed = i_prime_closed();
  return IPrimePair{brute, closed, std::abs(brute - closed)};
}

IPrimePair local_I_prime(const TripleSpec& spec, bool extended) {
  TripleEngine engine(spec);
  return engine.local_I_prime(spec.l1, spec.l2, extended);
}

// ---------------------------------------------------------------------------
// Matrix coefficients

cplx mc_principal_table(const InducedRepSpec& pr, const Zp& x, const Zp& y,
                        int j) {
  if (pr.kind != InducedKind::Principal)
    throw std::invalid_argument("mc_principal_table: principal family only");
  const std::int64_t p = pr.prime();
  const int m = pr.m;
  const int vy = y.valuation();
  const int jeff = std::min(std::max(j, 0), m);

  if (jeff == m) {
    if (vy >= 0 && val_at_least(x, 0))
      return pr.chi2.value(y) * q_half_pow(p, -vy);
    if (vy <= 0 && val_at_least(x, vy))
      return pr.chi2.value(y) * q_half_pow(p, vy);
    return cplx{0.0, 0.0};
  }

  if (jeff == 0) {
    Zp s = x + y;
    const int bound = std::min(-m, vy);
    if (s.is_exact_zero()) return cplx{0.0, 0.0};
    if (s.is_bounded()) {
      if (s.vmin() > bound) return cplx{0.0, 0.0};
      throw PrecisionError("mc_principal_table: unresolved cancellation");
    }
    int vs = s.valuation();
    if (vs > bound) return cplx{0.0, 0.0};
    MultChar ratio = pr.chi1.inverse() * pr.chi2;
    return pr.chi1.value(y) * q_half_pow(p, -vy) * ratio.value(s) *
           rat_pow(p, vs).to_double();
  }

  // 0 < jeff < m
  if (vy <= jeff - m && val_at_least(x, vy + m - jeff - 1)) {
    const int digits = y.digits();
    Zp t = Zp::from_int(p, 1, digits) +
           x * Zp::from_pow(p, jeff, digits) / y;
    MultChar ratio = pr.chi1.inverse() * pr.chi2;
    return pr.chi2.value(y) * q_half_pow(p, vy) * ratio.value(t);
  }
  return cplx{0.0, 0.0};
}

cplx mc_principal_tsum(const WhittakerEvaluator& plain, const Mat2& g) {
  const InducedRepSpec& sp = plain.spec();
  if (sp.kind != InducedKind::Principal)
    throw std::invalid_argument("mc_principal_tsum: principal family only");
  const std::int64_t p = sp.prime();
  const int m = sp.m;
  const int sigma = plain.sigma();
  const MultChar& chi1 = sp.chi1;
  const MultChar& chi2 = sp.chi2;
  const MultChar omega = sp.central_char();
  const double q = static_cast<double>(p);
  const double pref2 =
      (zeta_p(p, 2) / (zeta_p(p, 1) * zeta_p(p, 1))).to_double();

  CornerDecomposition dec = decompose_corner(g, m);
  const Zp xi = dec.bA / dec.bD;
  const Zp kap = dec.bB / dec.bD;
  const cplx om = omega.value(dec.bD);
  const int w = xi.valuation();

  if (dec.j == m) {
    // Both vectors sit in their unramified cells; each torus shell
    // contributes q^{-n} times the additive shell integral, and the single
    // negative edge exactly cancels the plateau above it.
    const int n0 = std::max(0, -w);
    bool plateau;
    if (kap.is_exact_zero()) {
      plateau = true;
    } else if (kap.is_regular()) {
      plateau = kap.valuation() >= -n0;
    } else if (kap.vmin() >= -n0) {
      plateau = true;
    } else {
      throw PrecisionError("mc_principal_tsum: unresolved additive level");
    }
    if (!plateau) return cplx{0.0, 0.0};
    cplx base = om * pref2 * chi2.value_at(w, 1) * q_half_pow(p, -w);
    return base * rat_pow(p, -n0).to_double() * (q / (q - 1.0));
  }

  if (dec.j == 0) {
    // The ramified unit integral pins the torus valuation to the single
    // shell where the combined additive frequency meets the conductor.
    Zp freq = kap + xi;
    if (freq.is_exact_zero()) return cplx{0.0, 0.0};
    const int nmin = std::max(0, -m - w);
    if (freq.is_bounded()) {
      if (freq.vmin() > -m - nmin) return cplx{0.0, 0.0};
      throw PrecisionError("mc_principal_tsum: unresolved frequency");
    }
    const int nstar = -m - freq.valuation();
    if (nstar < nmin) return cplx{0.0, 0.0};
    cplx eps0 = epsilon_factor(1.0, chi1 * chi2.inverse(), -sigma);
    cplx gval = g_function_closed(chi1.unit, freq.shifted(nstar), sigma);
    return om * pref2 * eps0 * chi1.value(xi) * chi1.value_at(nstar, 1) *
           chi2.value_at(-nstar, 1) * q_half_pow(p, -(2 * nstar + w)) * gval;
  }

  // Middle cell: a single torus shell against the finite unipotent sum of
  // the oldform table.
  {
    const int jj = dec.j;
    const int nstar = (jj - m) - w;
    if (nstar < 0) return cplx{0.0, 0.0};
    const int span = m - jj;
    std::int64_t pspan = 1;
    for (int i = 0; i < span; ++i) pspan *= p;
    const int digits = xi.digits();
    const MultChar chi1inv = chi1.inverse();
    cplx inner{0.0, 0.0};
    for (std::int64_t u = 0; u < pspan; ++u) {
      Zp arg = Zp::from_int(p, 1, digits) +
               Zp::from_int(p, u, digits) * Zp::from_pow(p, jj, digits);
      Zp f = kap - Zp::from_int(p, u, digits) * xi;
      inner += chi1inv.value(arg) *
               g_function_closed(UnitChar::trivial(p), f.shifted(nstar),
                                 sigma);
    }
    return om * pref2 * chi2.value_at(w, 1) * rat_pow(p, -span).to_double() *
           q_half_pow(p, -(2 * nstar + w)) * inner;
  }
}

cplx mc_supercuspidal_tsum(const SupercuspidalEvaluator& ev,
                           const SupercuspidalEvaluator& ev_dual,
                           const Mat2& g) {
  const int level = ev.invariance_level();
  if (ev_dual.invariance_level() != level ||
      ev_dual.sigma() == ev.sigma())
    throw std::invalid_argument(
        "mc_supercuspidal_tsum: the two vectors must be a dual pair");

  CornerDecomposition dec = decompose_corner(g, level);
  const Zp xi = dec.bA / dec.bD;
  const Zp kap = dec.bB / dec.bD;
  const int w = xi.valuation();

  const KirillovVector& vec = ev.corner_vector(dec.j);
  const KirillovVector& dvec = ev_dual.corner_vector(level);
  cplx total{0.0, 0.0};
  for (const auto& [rd, dcomps] : dvec.shells()) {
    for (const auto& [r, comps] : vec.shells()) {
      if (r != rd + w) continue;
      for (const auto& [nud, cd] : dcomps) {
        for (const auto& [nu, cc] : comps) {
          UnitChar prod = nu * nud;
          cplx gval =
              g_function_closed(prod, kap.shifted(rd), ev.sigma());
          if (gval == cplx{0.0, 0.0}) continue;
          total += cc * cd * unit_char_value(nu, xi) * gval;
        }
      }
    }
  }
  return total;
}

cplx matrix_coefficient_I(const TripleSpec& spec) {
  spec.validate();
  if (spec.kind != TripleKind::Supercuspidal)
    throw std::domain_error(
        "matrix_coefficient_I: only the supercuspidal case is tabulated");
  if (spec.c >= 4)
    throw std::domain_error(
        "matrix_coefficient_I: supports are tabulated for conductor < 4");
  if (spec.l1 != spec.l2)
    throw std::domain_error(
        "matrix_coefficient_I: the two translates must be equal");
  if (spec.l1 > spec.m - spec.c)
    throw std::domain_error(
        "matrix_coefficient_I: translate outside the tabulated range");

  const std::int64_t p = spec.p;
  const int m = spec.m;
  const int l = spec.l1;
  const int cl = spec.c + l;
  const int digits = digits_for(spec, l);
  const InducedRepSpec pr = make_principal(spec.omega1, spec.omega2);
  SupercuspidalEvaluator ev(*spec.eps, false, l, digits);
  SupercuspidalEvaluator evd(*spec.eps, true, l, digits);
  const cplx t3_unit =
      mc_supercuspidal_tsum(ev, evd, mat_identity(p, digits));
  if (std::abs(t3_unit) < 1e-12)
    throw std::runtime_error("matrix_coefficient_I: degenerate pairing");

  const int M = std::max({m, cl, 1});
  // The corner-weight rebalancing (the q-fold top cell) belongs to the
  // single-integral route, where the big-cell value at the Weyl point is
  // folded into the corner values.  Here every right coset unfolds, by
  // absorbing its upper-triangular part into an (x, y) substitution, to the
  // integral at its own corner representative, so each corner enters with
  // its plain Haar volume; the top cell is a single coset of mass
  // 1 / (q^{M-1} (q+1)).
  std::vector<Rat64> weights = corner_weights(p, M);
  weights[static_cast<size_t>(M)] /= Rat64{p};
  const KirillovVector& dvec = evd.corner_vector(cl);

  cplx total{0.0, 0.0};
  for (int j = 0; j <= M; ++j) {
    const KirillovVector& vec = ev.corner_vector(std::min(j, cl));
    if (vec.empty()) continue;
    int cmax = std::max(vec.max_level(), dvec.max_level());
    Mat2 cj = mat_corner(p, j, digits);

    cplx corner{0.0, 0.0};
    for (const auto& [rho, comps] : vec.shells()) {
      for (const auto& [rd, dcomps] : dvec.shells()) {
        // The third coefficient confines the torus coordinate to the shell
        // matching this component pair.
        const int wv = rho - rd;
        const int dy = std::max({m, cmax, 1}) + 1;
        cplx yint = integrate_mult_shell(p, wv, dy, [&](const Zp& ys) {
          // The quadrature hands out samples at the cell depth; the torus
          // sums burn digits, and the integrand is constant on the cells,
          // so lift the representative to the full budget.
          const Zp y = Zp::from_unit(
              p, wv, static_cast<std::int64_t>(ys.unit_mod(dy)), digits);
          // Everything is eventually constant in the unipotent coordinate:
          // beyond s_ball every predicate and unit class is frozen.
          const int s_ball = std::max({-l, 0, wv + m + 1}) + 1;
          const int s_lo = -rd - cmax - 2;
          cplx xint{0.0, 0.0};
          for (int s = s_lo; s < s_ball; ++s) {
            int dx = std::max({cmax, m, -m - s + 1,
                               s == wv ? m + std::min(-m, wv) - s : 0, 1}) +
                     1;
            xint += integrate_additive_shell(p, s, dx, [&](const Zp& xs) {
              const Zp x = Zp::from_unit(
                  p, s, static_cast<std::int64_t>(xs.unit_mod(dx)), digits);
              cplx f1 = mc_principal_table(pr, x, y, j);
              if (f1 == cplx{0.0, 0.0}) return cplx{0.0, 0.0};
              cplx f3 =
                  mc_supercuspidal_tsum(ev, evd, mat_n(x) * mat_a(y) * cj) /
                  t3_unit;
              return std::norm(f1) * f3;
            });
          }
          Zp xb = Zp::from_pow(p, s_ball, digits);
          cplx f1 = mc_principal_table(pr, xb, y, j);
          if (f1 != cplx{0.0, 0.0}) {
            cplx f3 =
                mc_supercuspidal_tsum(ev, evd, mat_n(xb) * mat_a(y) * cj) /
                t3_unit;
            xint += std::norm(f1) * f3 * rat_pow(p, -s_ball).to_double();
          }
          return xint;
        });
        corner += yint * rat_pow(p, wv).to_double();
      }
    }
    total += weights[static_cast<size_t>(j)].to_double() * corner;
  }
  return total;
}

}  // namespace tpl
