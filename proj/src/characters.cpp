#include "characters.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>

namespace tpl {

namespace {

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  __int128 r = 1, bb = b % m;
  while (e) {
    if (e & 1) r = (r * bb) % m;
    bb = (bb * bb) % m;
    e >>= 1;
  }
  return static_cast<std::uint64_t>(r);
}

std::vector<std::int64_t> prime_factors(std::int64_t n) {
  std::vector<std::int64_t> fs;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) {
      fs.push_back(d);
      while (n % d == 0) n /= d;
    }
  if (n > 1) fs.push_back(n);
  return fs;
}

std::int64_t primitive_root_mod_p(std::int64_t p) {
  auto fs = prime_factors(p - 1);
  for (std::int64_t g = 2; g < p; ++g) {
    bool ok = true;
    for (std::int64_t f : fs)
      if (pow_mod(g, static_cast<std::uint64_t>((p - 1) / f), p) == 1) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
  throw std::logic_error("no primitive root (p not prime?)");
}

UnitGroup build_unit_group(std::int64_t p, int c) {
  if (c < 1) throw std::domain_error("unit_group: level >= 1 required");
  UnitGroup G;
  G.p = p;
  G.c = c;
  if (pow_u64(p, c) > (std::uint64_t{1} << 22))
    throw std::overflow_error("unit_group: p^c too large to tabulate");
  G.modulus = pow_u64(p, c);
  G.dlog.assign(G.modulus, -1);
  if (p == 2 && c == 1) {
    G.dlog[1] = 0;  // trivial group
    return G;
  }
  if (p == 2 && c == 2) {
    G.gens = {3};
    G.orders = {2};
    G.dlog[1] = 0;
    G.dlog[3] = 1;
    return G;
  }
  if (p == 2) {
    // (Z/2^c)^x = <-1> x <5>, orders 2 and 2^{c-2}.
    std::uint64_t M = G.modulus;
    G.gens = {M - 1, 5};
    G.orders = {2, static_cast<std::int64_t>(pow_u64(2, c - 2))};
    for (std::int64_t a = 0; a < 2; ++a)
      for (std::int64_t b = 0; b < G.orders[1]; ++b) {
        std::uint64_t u = pow_mod(5, static_cast<std::uint64_t>(b), M);
        if (a) u = static_cast<std::uint64_t>(
                    (static_cast<__int128>(u) * (M - 1)) % M);
        G.dlog[u] = a + 2 * b;
      }
    return G;
  }
  // Odd p: one primitive root; lift it from mod p when it degenerates mod p^2.
  std::int64_t g = primitive_root_mod_p(p);
  if (c >= 2 && pow_mod(static_cast<std::uint64_t>(g),
                        static_cast<std::uint64_t>(p - 1), p * p) == 1)
    g += p;
  std::int64_t ord = (p - 1) * static_cast<std::int64_t>(pow_u64(p, c - 1));
  G.gens = {static_cast<std::uint64_t>(g) % G.modulus};
  G.orders = {ord};
  std::uint64_t t = 1;
  for (std::int64_t k = 0; k < ord; ++k) {
    G.dlog[t] = k;
    t = static_cast<std::uint64_t>(
        (static_cast<__int128>(t) * static_cast<std::uint64_t>(g)) %
        G.modulus);
  }
  return G;
}

}  // namespace

std::vector<std::int64_t> UnitGroup::exponents_of(std::uint64_t u) const {
  u %= modulus;
  std::int64_t packed = dlog[u];
  if (packed < 0) throw std::domain_error("UnitGroup: not a unit");
  if (gens.empty()) return {};
  if (gens.size() == 1) return {packed};
  return {packed % orders[0], packed / orders[0]};
}

const UnitGroup& unit_group(std::int64_t p, int c) {
  static std::mutex mu;
  static std::map<std::pair<std::int64_t, int>, std::unique_ptr<UnitGroup>>
      cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, c);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<UnitGroup>(build_unit_group(p, c)))
             .first;
  return *it->second;
}

UnitChar UnitChar::trivial(std::int64_t p) {
  UnitChar chi;
  chi.p_ = p;
  chi.c_ = 1;
  chi.conductor_ = 0;
  chi.exps_.assign(unit_group(p, 1).gens.size(), 0);
  return chi;
}

int UnitChar::compute_conductor(std::int64_t p, int c,
                                const std::vector<std::int64_t>& exps) {
  // Direct formula from the exponents: the principal-unit filtration matches
  // the p-part of the generator exponents.  The enumeration in
  // enumerate_conductor() is kept as an independent check.
  const UnitGroup& G = unit_group(p, c);
  bool all_zero = true;
  for (size_t i = 0; i < exps.size(); ++i)
    if (exps[i] % G.orders[i] != 0) all_zero = false;
  if (all_zero) return 0;
  if (p == 2) {
    if (c == 1) return 0;
    if (c == 2) return 2;
    std::int64_t k1 = exps[1] % G.orders[1];
    if (k1 < 0) k1 += G.orders[1];
    if (k1 == 0) return 2;  // only the -1 generator is seen: level-4 character
    int v2 = 0;
    while (k1 % 2 == 0) { k1 /= 2; ++v2; }
    return c - v2;
  }
  std::int64_t k = exps[0] % G.orders[0];
  if (k < 0) k += G.orders[0];
  int vp = 0;
  while (k % p == 0) { k /= p; ++vp; }
  return std::max(c - vp, 1);
}

int UnitChar::enumerate_conductor(std::int64_t p, int c,
                                  const std::vector<std::int64_t>& exps) {
  const UnitGroup& G = unit_group(p, c);
  auto angle_of = [&](std::uint64_t u) {
    auto e = G.exponents_of(u);
    Angle a;
    for (size_t i = 0; i < e.size(); ++i)
      a = a + Angle(exps[i] * e[i], G.orders[i]);
    return a;
  };
  for (int cp = 0; cp <= c; ++cp) {
    std::uint64_t step = pow_u64(p, cp);
    bool trivial_on_layer = true;
    for (std::uint64_t u = 1 % G.modulus; trivial_on_layer && u < G.modulus;
         u += step) {
      if (u % static_cast<std::uint64_t>(p) == 0) continue;
      if (!angle_of(u).is_zero()) trivial_on_layer = false;
    }
    if (trivial_on_layer) return cp;
  }
  return c;  // trivial on {1}, always reached
}

UnitChar UnitChar::at_level(std::int64_t p, int c,
                            std::vector<std::int64_t> exps) {
  const UnitGroup& G = unit_group(p, c);
  if (exps.size() != G.gens.size())
    throw std::logic_error("UnitChar: exponent count mismatch");
  for (size_t i = 0; i < exps.size(); ++i) {
    exps[i] %= G.orders[i];
    if (exps[i] < 0) exps[i] += G.orders[i];
  }
  int cond = compute_conductor(p, c, exps);
  int canon = std::max(cond, 1);
  UnitChar chi;
  chi.p_ = p;
  chi.conductor_ = cond;
  if (canon == c) {
    chi.c_ = c;
    chi.exps_ = std::move(exps);
    return chi;
  }
  // Restrict to the canonical level: read off the values on its generators
  // (their integer representatives are also units at level c).
  const UnitGroup& Gc = unit_group(p, canon);
  auto angle_of = [&](std::uint64_t u) {
    auto e = G.exponents_of(u % G.modulus);
    Angle a;
    for (size_t i = 0; i < e.size(); ++i)
      a = a + Angle(exps[i] * e[i], G.orders[i]);
    return a;
  };
  chi.c_ = canon;
  chi.exps_.clear();
  for (size_t i = 0; i < Gc.gens.size(); ++i) {
    Angle a = angle_of(Gc.gens[i]);
    if (Gc.orders[i] % a.den != 0)
      throw std::logic_error("UnitChar: restriction is not a character");
    chi.exps_.push_back(a.num * (Gc.orders[i] / a.den));
  }
  return chi;
}

UnitChar UnitChar::from_exponents(std::int64_t p, int c,
                                  std::vector<std::int64_t> exps) {
  return at_level(p, c, std::move(exps));
}

UnitChar UnitChar::from_values(std::int64_t p, int c,
                               const std::function<Angle(std::uint64_t)>& val) {
  const UnitGroup& G = unit_group(p, c);
  std::vector<std::int64_t> exps;
  for (size_t i = 0; i < G.gens.size(); ++i) {
    Angle a = val(G.gens[i]);
    if (G.orders[i] % a.den != 0)
      throw std::domain_error("from_values: generator value has wrong order");
    exps.push_back(a.num * (G.orders[i] / a.den));
  }
  UnitChar chi = at_level(p, c, std::move(exps));
  for (std::uint64_t u = 1; u < G.modulus; ++u) {
    if (u % static_cast<std::uint64_t>(p) == 0) continue;
    if (!(chi.angle(u) == val(u)))
      throw std::domain_error("from_values: values are not a homomorphism");
  }
  return chi;
}

UnitChar UnitChar::random_with_conductor(std::int64_t p, int c,
                                         std::mt19937_64& rng) {
  if (c == 0) return trivial(p);
  if (p == 2 && c == 1)
    throw std::domain_error("no character of conductor 2^1 exists");
  const UnitGroup& G = unit_group(p, c);
  for (int attempt = 0; attempt < 4096; ++attempt) {
    std::vector<std::int64_t> exps;
    for (auto ord : G.orders)
      exps.push_back(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(ord)));
    UnitChar chi = at_level(p, c, std::move(exps));
    if (chi.conductor() == c) return chi;
  }
  throw std::logic_error("random_with_conductor: sampling failed");
}

std::int64_t UnitChar::order() const {
  const UnitGroup& G = unit_group(p_, c_);
  std::int64_t ord = 1;
  for (size_t i = 0; i < exps_.size(); ++i) {
    std::int64_t gi = std::gcd(exps_[i], G.orders[i]);
    ord = std::lcm(ord, G.orders[i] / gi);
  }
  return ord;
}

Angle UnitChar::angle(std::uint64_t u) const {
  const UnitGroup& G = unit_group(p_, c_);
  auto e = G.exponents_of(u % G.modulus);
  Angle a;
  for (size_t i = 0; i < e.size(); ++i)
    a = a + Angle(exps_[i] * e[i], G.orders[i]);
  return a;
}

UnitChar UnitChar::inverse() const {
  const UnitGroup& G = unit_group(p_, c_);
  UnitChar chi = *this;
  for (size_t i = 0; i < chi.exps_.size(); ++i)
    if (chi.exps_[i] != 0) chi.exps_[i] = G.orders[i] - chi.exps_[i];
  return chi;
}

UnitChar operator*(const UnitChar& a, const UnitChar& b) {
  if (a.p_ != b.p_) throw std::logic_error("UnitChar: mixed primes");
  int L = std::max(a.c_, b.c_);
  const UnitGroup& G = unit_group(a.p_, L);
  auto lift = [&](const UnitChar& chi) {
    std::vector<std::int64_t> exps;
    for (size_t i = 0; i < G.gens.size(); ++i) {
      Angle v = chi.angle(G.gens[i]);
      exps.push_back(v.num * (G.orders[i] / v.den));
    }
    return exps;
  };
  std::vector<std::int64_t> ea = lift(a), eb = lift(b);
  for (size_t i = 0; i < ea.size(); ++i) ea[i] += eb[i];
  return UnitChar::at_level(a.p_, L, std::move(ea));
}

UnitChar UnitChar::pow(std::int64_t k) const {
  const UnitGroup& G = unit_group(p_, c_);
  std::vector<std::int64_t> exps = exps_;
  for (size_t i = 0; i < exps.size(); ++i) {
    __int128 e = static_cast<__int128>(exps[i]) * k % G.orders[i];
    if (e < 0) e += G.orders[i];
    exps[i] = static_cast<std::int64_t>(e);
  }
  return at_level(p_, c_, std::move(exps));
}

bool UnitChar::verify_conductor() const {
  return enumerate_conductor(p_, c_, exps_) == conductor_ &&
         compute_conductor(p_, c_, exps_) == conductor_;
}

cplx MultChar::value_at(int v, std::uint64_t u) const {
  Angle a = arg_pi.times(v) + unit.angle(u);
  cplx z = a.to_complex();
  if (abs_pi != 1.0) z *= std::pow(abs_pi, v);
  return z;
}

Angle MultChar::angle_at(int v, std::uint64_t u) const {
  return arg_pi.times(v) + unit.angle(u);
}

cplx MultChar::value(const Zp& x) const {
  if (x.is_exact_zero())
    throw std::domain_error("MultChar: value at zero");
  if (x.is_bounded())
    throw PrecisionError("MultChar: value at a bounded zero");
  return value_at(x.valuation(), x.unit_mod(std::min(x.digits(), unit.level())));
}

MultChar MultChar::inverse() const {
  return MultChar{unit.inverse(), 1.0 / abs_pi, -arg_pi};
}

MultChar operator*(const MultChar& a, const MultChar& b) {
  return MultChar{a.unit * b.unit, a.abs_pi * b.abs_pi, a.arg_pi + b.arg_pi};
}

Angle psi_angle(int sigma, const Zp& x) {
  if (x.is_exact_zero()) return Angle();
  if (x.vmin() >= 0) return Angle();
  if (x.is_bounded())
    throw PrecisionError("psi_angle: bounded zero sticking out of Z_p");
  int m = -x.valuation();
  std::uint64_t den = pow_u64(x.prime(), m);
  if (den > static_cast<std::uint64_t>(INT64_MAX))
    throw std::overflow_error("psi_angle: fractional denominator overflow");
  std::int64_t num = static_cast<std::int64_t>(x.unit_mod(m));
  return Angle(sigma >= 0 ? num : -num, static_cast<std::int64_t>(den));
}

cplx epsilon_factor(double s, const MultChar& chi, int sigma) {
  const std::int64_t q = chi.prime();
  const int c = chi.conductor();
  if (c == 0) return {1.0, 0.0};
  const std::uint64_t M = pow_u64(q, c);
  AngleAccumulator acc;
  for (std::uint64_t u = 1; u < M; ++u) {
    if (u % static_cast<std::uint64_t>(q) == 0) continue;
    Angle a = -chi.unit.angle(u) +
              Angle(sigma >= 0 ? static_cast<std::int64_t>(u)
                               : -static_cast<std::int64_t>(u),
                    static_cast<std::int64_t>(M));
    acc.add(a, Rat64{1});
  }
  cplx S = acc.to_complex();

  // chi(uniformizer)^c, skipped entirely when it is exactly 1.
  Angle arg_c = chi.arg_pi.times(c);
  if (!(chi.abs_pi == 1.0 && arg_c.is_zero())) {
    cplx w = arg_c.to_complex();
    if (chi.abs_pi != 1.0) w *= std::pow(chi.abs_pi, c);
    S *= w;
  }

  // Scale by q^{-cs}: exact when 2cs is an integer (rational power of q,
  // with a single sqrt division when odd).
  double t = 2.0 * c * s;
  double k_real = std::llround(t);
  if (std::abs(t - k_real) < 1e-9) {
    std::int64_t k = std::llround(t);
    std::int64_t j = k >= 0 ? k / 2 : -((-k + 1) / 2);  // floor(k/2)
    int r = static_cast<int>(k - 2 * j);                 // 0 or 1
    if (j > 0)
      S /= rat_pow(q, static_cast<int>(j)).to_double();
    else if (j < 0)
      S *= rat_pow(q, static_cast<int>(-j)).to_double();
    if (r == 1) S /= std::sqrt(static_cast<double>(q));
  } else {
    S *= std::pow(static_cast<double>(q), -static_cast<double>(c) * s);
  }
  return S;
}

int kronecker_symbol(std::int64_t a, std::int64_t n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  if (a % 2 == 0 && n % 2 == 0) return 0;
  int k = 1;
  int v = 0;
  while (n % 2 == 0) { n /= 2; ++v; }
  if (v % 2 == 1) {
    std::int64_t am = ((a % 8) + 8) % 8;
    if (am == 3 || am == 5) k = -k;
  }
  if (n < 0) {
    n = -n;
    if (a < 0) k = -k;
  }
  a = ((a % n) + n) % n;
  while (a != 0) {
    v = 0;
    while (a % 2 == 0) { a /= 2; ++v; }
    if (v % 2 == 1) {
      std::int64_t nm = n % 8;
      if (nm == 3 || nm == 5) k = -k;
    }
    if ((a % 4 == 3) && (n % 4 == 3)) k = -k;
    std::int64_t t = n % a;
    n = a;
    a = t;
  }
  return n == 1 ? k : 0;
}

MultChar kronecker_component(std::int64_t D, std::int64_t p, Angle arg_pi) {
  if (p == 2 ? (D % 2 != 0 ? (((D % 4) + 4) % 4 == 1) : false)
             : (D % p != 0)) {
    // Unramified at p: trivial on units; the uniformizer value carries (D|p).
    Angle a = kronecker_symbol(D, p) == 1 ? Angle() : Angle(1, 2);
    return MultChar{UnitChar::trivial(p), 1.0, a};
  }
  if (p != 2) {
    const UnitGroup& G = unit_group(p, 1);
    UnitChar quad =
        UnitChar::from_exponents(p, 1, {G.orders[0] / 2});
    return MultChar{quad, 1.0, arg_pi};
  }
  // p = 2 with 4 | D: split off the odd prime discriminants; what remains is
  // one of -4, 8, -8, and the unit part is u -> (that | u) at level 3.
  std::int64_t odd = std::abs(D);
  while (odd % 2 == 0) odd /= 2;
  std::int64_t D_odd = (odd % 4 == 1) ? odd : -odd;
  std::int64_t D2 = D / D_odd;
  UnitChar u2 = UnitChar::from_values(2, 3, [&](std::uint64_t u) {
    return kronecker_symbol(D2, static_cast<std::int64_t>(u)) == 1
               ? Angle()
               : Angle(1, 2);
  });
  return MultChar{u2, 1.0, arg_pi};
}

Angle random_angle(std::mt19937_64& rng) {
  return Angle(static_cast<std::int64_t>(rng() % 2520), 2520);
}

}  // namespace tpl
