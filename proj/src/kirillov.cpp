#include "kirillov.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "angle.hpp"
#include "rational.hpp"

namespace tpl {

namespace {

const cplx& cached_epsilon(const UnitChar& chi, int sigma) {
  static std::mutex mu;
  static std::map<std::pair<int, UnitChar>, cplx> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(sigma, chi);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, epsilon_factor(1.0, chi, sigma)).first;
  return it->second;
}

std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) {
    h ^= (x >> (8 * i)) & 0xffu;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

const std::vector<UnitChar>& chars_of_conductor(std::int64_t p, int L) {
  static std::mutex mu;
  static std::map<std::pair<std::int64_t, int>, std::vector<UnitChar>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, L);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<UnitChar> out;
  if (L == 0) {
    out.push_back(UnitChar::trivial(p));
  } else {
    const UnitGroup& G = unit_group(p, L);
    std::vector<std::int64_t> exps(G.gens.size(), 0);
    bool done = G.gens.empty();
    while (!done) {
      UnitChar chi = UnitChar::from_exponents(p, L, exps);
      if (chi.conductor() == L) out.push_back(chi);
      size_t i = 0;
      for (; i < exps.size(); ++i) {
        if (++exps[i] < G.orders[i]) break;
        exps[i] = 0;
      }
      done = (i == exps.size());
    }
    std::sort(out.begin(), out.end());
  }
  return cache.emplace(key, std::move(out)).first->second;
}

cplx g_function_closed(const UnitChar& chi, const Zp& t, int sigma) {
  const std::int64_t q = chi.prime();
  const int c = chi.conductor();
  if (t.vmin() >= 0)  // includes the exact zero
    return c == 0 ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
  if (t.is_bounded())
    throw PrecisionError("g_function: shell of t is undetermined");
  const int vt = t.valuation();
  if (c == 0)
    return vt == -1 ? cplx{-1.0 / static_cast<double>(q - 1), 0.0}
                    : cplx{0.0, 0.0};
  if (vt != -c) return {0.0, 0.0};
  if (t.digits() < c)
    throw PrecisionError("g_function: unit of t needed mod p^c");
  const double zeta1 = static_cast<double>(q) / static_cast<double>(q - 1);
  return zeta1 * (-chi.angle(t.unit_mod(c))).to_complex() *
         cached_epsilon(chi.inverse(), sigma);
}

cplx g_function_bruteforce(const UnitChar& chi, const Zp& t, int sigma) {
  const std::int64_t p = chi.prime();
  if (t.is_bounded() && t.vmin() < 0)
    throw PrecisionError("g_function: shell of t is undetermined");
  int vt = 0;
  if (t.is_regular()) vt = t.valuation();
  const int L = std::max({chi.conductor(), -vt, 1});
  const std::uint64_t mod = pow_u64(p, L);
  const Rat64 weight = Rat64{1} / (Rat64{p - 1} * rat_pow(p, L - 1));
  AngleAccumulator acc;
  for (std::uint64_t u = 1; u < mod; ++u) {
    if (u % static_cast<std::uint64_t>(p) == 0) continue;
    Angle a = chi.angle(u);
    if (!t.is_exact_zero()) {
      Zp x = t * Zp::from_unit(p, 0, static_cast<std::int64_t>(u),
                               std::max(t.digits(), L));
      a = a + psi_angle(sigma, x);
    }
    acc.add(a, weight);
  }
  return acc.to_complex();
}

EpsilonData::EpsilonData(std::int64_t p, int c, int c1_sign,
                         std::uint64_t seed)
    : p_(p), c_(c), c1_(c1_sign), seed_(seed) {
  if (c1_sign != 1 && c1_sign != -1)
    throw std::invalid_argument("EpsilonData: C(trivial) must be +1 or -1");
  if (c < 2)
    throw std::invalid_argument("EpsilonData: conductor is at least 2");
  for (int L = 1; L <= 3; ++L) {
    int checked = 0;
    for (const UnitChar& nu : chars_of_conductor(p, L)) {
      if (++checked > 8) break;
      if (C(nu) * C(nu.inverse()) != cplx{1.0, 0.0})
        throw std::logic_error("EpsilonData: C involution violated");
    }
  }
}

EpsilonData EpsilonData::random(std::int64_t p, int c, std::mt19937_64& rng) {
  const int sign = (rng() & 1u) ? 1 : -1;
  return EpsilonData(p, c, sign, rng());
}

cplx EpsilonData::C(const UnitChar& nu) const {
  if (nu.prime() != p_)
    throw std::invalid_argument("EpsilonData: character has the wrong prime");
  if (nu.is_trivial()) return {static_cast<double>(c1_), 0.0};
  const UnitChar inv = nu.inverse();
  const bool self_paired = (inv == nu);
  const bool rep_is_nu = self_paired || nu < inv;
  const UnitChar& rep = rep_is_nu ? nu : inv;
  std::uint64_t h = fnv_mix(0xcbf29ce484222325ull, seed_);
  h = fnv_mix(h, static_cast<std::uint64_t>(p_));
  h = fnv_mix(h, static_cast<std::uint64_t>(rep.conductor()));
  for (std::int64_t e : rep.exponents())
    h = fnv_mix(h, static_cast<std::uint64_t>(e));
  if (self_paired) return {(h & 1u) ? -1.0 : 1.0, 0.0};
  static const cplx kFourth[4] = {
      cplx{1.0, 0.0}, cplx{0.0, 1.0}, cplx{-1.0, 0.0}, cplx{0.0, -1.0}};
  const int k = static_cast<int>(h & 3u);
  return rep_is_nu ? kFourth[k] : kFourth[(4 - k) & 3];
}

KirillovVector KirillovVector::newform(std::int64_t p) {
  KirillovVector v(p);
  v.add(0, UnitChar::trivial(p), cplx{1.0, 0.0});
  return v;
}

void KirillovVector::add(int r, const UnitChar& nu, const cplx& coeff) {
  if (coeff == cplx{0.0, 0.0}) return;
  auto& shell = shells_[r];
  auto [it, inserted] = shell.try_emplace(nu, coeff);
  if (!inserted) it->second += coeff;
}

void KirillovVector::prune(double rel_tol) {
  double scale = 0.0;
  for (const auto& [r, comps] : shells_)
    for (const auto& [nu, c] : comps) scale = std::max(scale, std::abs(c));
  const double cut = rel_tol * std::max(scale, 1.0);
  for (auto it = shells_.begin(); it != shells_.end();) {
    for (auto jt = it->second.begin(); jt != it->second.end();)
      jt = std::abs(jt->second) <= cut ? it->second.erase(jt) : std::next(jt);
    it = it->second.empty() ? shells_.erase(it) : std::next(it);
  }
}

int KirillovVector::max_level() const {
  int L = 0;
  for (const auto& [r, comps] : shells_)
    for (const auto& [nu, c] : comps) L = std::max(L, nu.conductor());
  return L;
}

cplx KirillovVector::eval(const Zp& y) const {
  if (y.is_exact_zero())
    throw std::domain_error("kirillov eval: a(0) is not a group element");
  if (y.is_bounded()) {
    if (shells_.empty() || y.vmin() > shells_.rbegin()->first)
      return {0.0, 0.0};
    throw PrecisionError("kirillov eval: shell of y is undetermined");
  }
  auto it = shells_.find(y.valuation());
  if (it == shells_.end()) return {0.0, 0.0};
  cplx total{0.0, 0.0};
  for (const auto& [nu, coeff] : it->second) {
    if (nu.is_trivial()) {
      total += coeff;
      continue;
    }
    if (y.digits() < nu.level())
      throw PrecisionError("kirillov eval: unit of y needed mod p^level");
    total += coeff * nu.value(y.unit_mod(nu.level()));
  }
  return total;
}

KirillovVector act_borel(const KirillovVector& v, const Zp& a, const Zp& b,
                         const Zp& d, int sigma) {
  const std::int64_t p = v.prime();
  if (!a.is_regular() || !d.is_regular())
    throw std::domain_error("act_borel: diagonal entries must be regular");
  const Zp ad = a / d;
  const int shift = ad.valuation();
  const Zp bd = b.is_exact_zero() ? b : b / d;
  KirillovVector out(p);
  for (const auto& [r, comps] : v.shells()) {
    const int rp = r - shift;
    const Zp t = bd.shifted(rp);
    for (const auto& [nu, coeff] : comps) {
      cplx base = coeff;
      if (!nu.is_trivial()) {
        if (ad.digits() < nu.level())
          throw PrecisionError("act_borel: diagonal unit needed mod p^level");
        base *= nu.value(ad.unit_mod(nu.level()));
      }
      if (t.vmin() >= 0) {  // integral twist: psi factor is 1
        out.add(rp, nu, base);
        continue;
      }
      if (t.is_bounded())
        throw PrecisionError("act_borel: twist shell undetermined");
      const int L = -t.valuation();
      if (L > kLevelGuard)
        throw std::domain_error("act_borel: re-expansion level beyond guard");
      auto expand = [&](const UnitChar& lam) {
        const cplx g = g_function_closed(lam, t, sigma);
        UnitChar mu = nu * lam.inverse();
        if (mu.conductor() > kLevelGuard)
          throw std::domain_error("act_borel: component level beyond guard");
        out.add(rp, mu, base * g);
      };
      if (L == 1) expand(UnitChar::trivial(p));
      for (const UnitChar& lam : chars_of_conductor(p, L)) expand(lam);
    }
  }
  out.prune();
  return out;
}

KirillovVector act_w(const KirillovVector& v, const EpsilonData& eps) {
  const std::int64_t p = v.prime();
  const int c = eps.conductor();
  KirillovVector out(p);
  for (const auto& [r, comps] : v.shells()) {
    for (const auto& [nu, coeff] : comps) {
      const int cn = nu.conductor();
      if (p == 2 && c == 2 * cn && c >= 4)
        throw ExceptionalCaseError(
            "act_w: dyadic component at half the conductor is outside the "
            "generic shell rule");
      const int rp = -r - std::max(c, 2 * cn);
      out.add(rp, nu.inverse(), coeff * eps.C(nu));
    }
  }
  out.prune();
  return out;
}

cplx sc_integral(const KirillovVector& v, const Zp& b, int sigma) {
  cplx total{0.0, 0.0};
  for (const auto& [r, comps] : v.shells())
    for (const auto& [nu, coeff] : comps)
      total += coeff * g_function_closed(nu, b.shifted(r), sigma);
  return total;
}

std::vector<std::pair<UnitChar, cplx>> level_components(
    const KirillovVector& v, int r) {
  std::vector<std::pair<UnitChar, cplx>> out;
  auto it = v.shells().find(r);
  if (it != v.shells().end())
    out.assign(it->second.begin(), it->second.end());
  return out;
}

SupercuspidalEvaluator::SupercuspidalEvaluator(const EpsilonData& eps,
                                               bool conjugated, int translate,
                                               int digits)
    : eps_(eps),
      sigma_(conjugated ? -1 : 1),
      l_(translate),
      digits_(digits) {
  if (translate < 0)
    throw std::invalid_argument("supercuspidal translate must be >= 0");
}

const KirillovVector& SupercuspidalEvaluator::corner_vector(int j) const {
  const int jc = std::clamp(j, 0, invariance_level());
  auto it = cache_.find(jc);
  if (it == cache_.end()) it = cache_.emplace(jc, build_corner(jc)).first;
  return it->second;
}

KirillovVector SupercuspidalEvaluator::build_corner(int j) const {
  const std::int64_t p = eps_.prime();
  const int c = eps_.conductor();
  const Zp one = Zp::from_unit(p, 0, 1, digits_);
  const Zp zero = Zp::exact_zero(p);
  const KirillovVector nf = KirillovVector::newform(p);
  if (j >= c + l_) {
    // the corner conjugates across a(p^{-l}) into the stability group
    return act_borel(nf, Zp::from_pow(p, -l_, digits_), zero, one, sigma_);
  }
  if (j <= l_) {
    // corner_j a(p^{-l}) = n(b) a(y') k0 modulo the stabilizer, with
    // k0 = (1 0; 1 1) = n(1) w n(1) z(-1), so one Borel action on the k0
    // vector: a-part p^{l-2j}, b-part p^{-j} - p^{l-2j}.
    KirillovVector k0 = act_borel(nf, one, one, one, sigma_);
    k0 = act_w(k0, eps_);
    k0 = act_borel(k0, one, one, one, sigma_);
    const Zp acoef = Zp::from_pow(p, l_ - 2 * j, digits_);
    const Zp bcoef = Zp::from_pow(p, -j, digits_) - acoef;
    return act_borel(k0, acoef, bcoef, one, sigma_);
  }
  // l < j < c + l: corner_j = w^{-1} n(-p^j) w.
  KirillovVector v =
      act_borel(nf, Zp::from_pow(p, -l_, digits_), zero, one, sigma_);
  v = act_w(v, eps_);
  v = act_borel(v, one, -Zp::from_pow(p, j, digits_), one, sigma_);
  v = act_w(v, eps_);
  return v;
}

cplx SupercuspidalEvaluator::at_corner(const Zp& y, int j) const {
  return corner_vector(j).eval(y);
}

cplx SupercuspidalEvaluator::at(const Mat2& g) const {
  CornerDecomposition dec = decompose_corner(g, invariance_level());
  const Zp y = dec.bA / dec.bD;
  return psi_angle(sigma_, dec.bB / dec.bD).to_complex() *
         corner_vector(dec.j).eval(y);
}

cplx SupercuspidalEvaluator::at_diag(const Zp& y) const {
  return corner_vector(invariance_level()).eval(y);
}

}  // namespace tpl
