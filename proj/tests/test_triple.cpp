#include <cmath>
#include <complex>
#include <memory>
#include <random>
#include <stdexcept>

#include "characters.hpp"
#include "doctest.h"
#include "haar.hpp"
#include "induced.hpp"
#include "kirillov.hpp"
#include "padic.hpp"
#include "triple.hpp"
#include "zeta.hpp"

using namespace tpl;

namespace {

Zp unit_shell(std::int64_t p, int v, std::int64_t u, int digits) {
  return Zp::from_unit(p, v, u, digits);
}

MultChar ramified(std::int64_t p, int m, std::mt19937_64& rng) {
  return MultChar{UnitChar::random_with_conductor(p, m, rng), 1.0,
                  random_angle(rng)};
}

MultChar unram(std::int64_t p, std::mt19937_64& rng) {
  return MultChar::unramified(p, 1.0, random_angle(rng));
}

Mat2 random_k1(std::int64_t p, int level, int digits, std::mt19937_64& rng) {
  Zp a = unit_shell(p, 0, 1 + p * static_cast<std::int64_t>(rng() % 89),
                    digits);
  Zp b = Zp::from_int(p, static_cast<std::int64_t>(rng() % 997), digits);
  Zp c = Zp::from_int(p, static_cast<std::int64_t>(rng() % 997), digits)
             .shifted(level);
  Zp d = Zp::from_int(p, 1, digits) +
         Zp::from_int(p, static_cast<std::int64_t>(rng() % 997), digits)
             .shifted(level);
  return Mat2{a, b, c, d};
}

double z1(std::int64_t p) { return zeta_p(p, 1).to_double(); }
double z2(std::int64_t p) { return zeta_p(p, 2).to_double(); }

}  // namespace

TEST_CASE("spec validation") {
  std::mt19937_64 rng(1);
  const std::int64_t p = 3;
  MultChar o1 = ramified(p, 2, rng);
  MultChar o2 = unram(p, rng);
  // Well-formed specs pass.
  CHECK_NOTHROW(make_steinberg_triple(p, 2, o1, o2, 1, 0, 0).validate());
  // omega1 must be ramified of the stated conductor.
  TripleSpec bad = make_steinberg_triple(p, 2, o1, o2, 1, 0, 0);
  bad.omega1 = o2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  // omega2 must be unramified.
  bad = make_steinberg_triple(p, 2, o1, o2, 1, 0, 0);
  bad.omega2 = o1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  // Spherical parameter must stay inside the open window.
  MultChar far = MultChar::unramified(p, static_cast<double>(p), Angle());
  CHECK_THROWS_AS(make_spherical_triple(p, 2, o1, o2, far, 0, 0).validate(),
                  std::invalid_argument);
  // Supercuspidal conductor is bounded by m.
  auto eps = std::make_shared<const EpsilonData>(p, 3, 1, 5);
  CHECK_THROWS_AS(
      make_supercuspidal_triple(p, 2, o1, o2, eps, false, 0, 0).validate(),
      std::invalid_argument);
  // Negative translates are rejected.
  CHECK_THROWS_AS(make_steinberg_triple(p, 2, o1, o2, 1, -1, 0).validate(),
                  std::invalid_argument);
}

TEST_CASE("translate range per kind") {
  std::mt19937_64 rng(2);
  MultChar o1 = ramified(3, 3, rng);
  MultChar o2 = unram(3, rng);
  CHECK(max_translate(make_steinberg_triple(3, 3, o1, o2, 1, 0, 0)) == 2);
  CHECK(max_translate(make_spherical_triple(3, 3, o1, o2, unram(3, rng), 0,
                                            0)) == 3);
  auto eps = std::make_shared<const EpsilonData>(3, 2, 1, 5);
  CHECK(max_translate(make_supercuspidal_triple(3, 3, o1, o2, eps, false, 0,
                                                0)) == 1);
}

TEST_CASE("L factor normalization") {
  std::mt19937_64 rng(3);
  const std::int64_t p = 3;
  MultChar o1 = ramified(p, 2, rng);
  MultChar o2 = unram(p, rng);

  TripleSpec st = make_steinberg_triple(p, 2, o1, o2, -1, 0, 0);
  CHECK(std::abs(adjoint_L(st, 1, 1.0) - zeta_s(p, 1.0)) < 1e-14);
  CHECK(std::abs(adjoint_L(st, 3, 1.0) - zeta_s(p, 2.0)) < 1e-14);
  // Triple factor of the Steinberg twist: L(s + 1/2, omega3)^2.
  cplx lhs = triple_L(st, 0.5);
  cplx expect = unramified_L(st.omega3, 1.0) * unramified_L(st.omega3, 1.0);
  CHECK(std::abs(lhs - expect) < 1e-14);

  MultChar o3 = unram(p, rng);
  TripleSpec sph = make_spherical_triple(p, 2, o1, o2, o3, 0, 0);
  cplx ad3 = adjoint_L(sph, 3, 1.0);
  cplx ad3_expect = zeta_s(p, 1.0) * unramified_L(o3 * o3, 1.0) *
                    unramified_L((o3 * o3).inverse(), 1.0);
  CHECK(std::abs(ad3 - ad3_expect) < 1e-13);

  auto eps = std::make_shared<const EpsilonData>(p, 2, 1, 5);
  TripleSpec scf = make_supercuspidal_triple(p, 2, o1, o2, eps, true, 0, 0);
  TripleSpec scn = make_supercuspidal_triple(p, 2, o1, o2, eps, false, 0, 0);
  double q = static_cast<double>(p);
  CHECK(std::abs(adjoint_L(scf, 3, 1.0) - cplx{1.0 / (1.0 + 1.0 / q), 0.0}) <
        1e-14);
  CHECK(std::abs(adjoint_L(scn, 3, 1.0) - cplx{1.0, 0.0}) < 1e-14);
  CHECK(std::abs(triple_L(scf, 0.5) - cplx{1.0, 0.0}) < 1e-14);
}

TEST_CASE("closed constants") {
  std::mt19937_64 rng(4);
  const std::int64_t p = 3;
  MultChar o1 = ramified(p, 2, rng);
  MultChar o2 = unram(p, rng);
  auto eps = std::make_shared<const EpsilonData>(p, 2, 1, 5);

  TripleEngine st(make_steinberg_triple(p, 2, o1, o2, 1, 0, 0));
  CHECK(std::abs(st.i_prime_closed() - cplx{4.0 / 27.0, 0.0}) < 1e-15);
  TripleEngine sph(make_spherical_triple(p, 2, o1, o2, unram(p, rng), 0, 0));
  CHECK(std::abs(sph.i_prime_closed() - cplx{1.0 / 9.0, 0.0}) < 1e-15);
  TripleEngine scf(
      make_supercuspidal_triple(p, 2, o1, o2, eps, true, 0, 0));
  CHECK(std::abs(scf.i_prime_closed() - cplx{1.0 / 9.0, 0.0}) < 1e-15);
  TripleEngine scn(
      make_supercuspidal_triple(p, 2, o1, o2, eps, false, 0, 0));
  CHECK(std::abs(scn.i_prime_closed() - cplx{4.0 / 27.0, 0.0}) < 1e-15);
}

TEST_CASE("bilinear form anchors") {
  std::mt19937_64 rng(5);
  const std::int64_t p = 3;
  const int m = 2;
  MultChar o1 = ramified(p, m, rng);
  MultChar o2 = unram(p, rng);

  // The sign of omega1 at -1 rides along with the newvector section, so the
  // analytic anchor for each single pairing carries it as a prefactor.
  double par = o1.unit.value(pow_u64(p, m) - 1).real() > 0.0 ? 1.0 : -1.0;

  // Steinberg: the full complex value, including the epsilon-factor phase.
  for (int sign : {1, -1}) {
    TripleSpec spec = make_steinberg_triple(p, m, o1, o2, sign, 1, 1);
    TripleEngine engine(spec);
    cplx epsv = epsilon_factor(1.0, o1.inverse() * o2, +1);
    double Lv = 1.0 / (1.0 - static_cast<double>(sign) / p);
    for (int l : {0, 1}) {
      double s3 = sign > 0 ? 1.0 : ((2 * l + 1) % 2 ? -1.0 : 1.0);
      cplx expect = -par * (z2(p) / std::pow(z1(p), 1.5)) * epsv * s3 * Lv;
      CHECK(std::abs(engine.ell(Side::Plain, l) - expect) < 1e-8);
      // The dual side carries the conjugate phase data; its modulus matches.
      CHECK(std::abs(std::abs(engine.ell(Side::Tilde, l)) -
                     std::abs(expect)) < 1e-8);
    }
  }

  // Spherical: the closed product of L values, independent of the translate.
  {
    MultChar o3 = unram(p, rng);
    TripleSpec spec = make_spherical_triple(p, m, o1, o2, o3, 1, 1);
    TripleEngine engine(spec);
    cplx epsv = epsilon_factor(1.0, o1.inverse() * o2, +1);
    cplx expect = par * (z2(p) * z2(p) / std::pow(z1(p), 2.5)) * epsv /
                  unramified_L(o3 * o3, 1.0) * unramified_L(o3, 0.5) *
                  unramified_L(o3.inverse(), 0.5);
    CHECK(std::abs(engine.ell(Side::Plain, 0) - expect) < 1e-8);
    CHECK(std::abs(engine.ell(Side::Plain, 1) - expect) < 1e-8);
  }

  // Supercuspidal: the modulus collapses to a power of q.
  for (int mm : {2, 3}) {
    std::mt19937_64 rng2(6);
    MultChar u1 = ramified(2, mm, rng2);
    MultChar u2 = unram(2, rng2);
    auto eps = std::make_shared<const EpsilonData>(2, 2, -1, 17);
    TripleSpec spec =
        make_supercuspidal_triple(2, mm, u1, u2, eps, false, 0, 0);
    TripleEngine engine(spec);
    double expect = std::pow(z2(2) / z1(2), 1.5) * q_half_pow(2, -mm);
    CHECK(std::abs(std::abs(engine.ell(Side::Plain, 0)) - expect) < 1e-8);
  }
}

TEST_CASE("bilinear form against a from-scratch shell integration") {
  // One full-strength cross-check of the engine's closed evaluators: the
  // same triple sum computed with the brute-force Whittaker integrals and
  // plain shell quadrature, truncated where the geometric decay is far below
  // the tolerance.
  std::mt19937_64 rng(7);
  const std::int64_t p = 2;
  const int m = 2;
  // The shell sweep reaches valuation 22, and the defining integrals divide
  // by the torus coordinate, so the budget must cover the sweep depth.
  const int digits = 30;
  MultChar o1 = ramified(p, m, rng);
  MultChar o2 = unram(p, rng);
  TripleSpec spec = make_steinberg_triple(p, m, o1, o2, 1, 0, 0);
  TripleEngine engine(spec);
  cplx closed = engine.ell(Side::Plain, 0);

  InducedRepSpec pr = make_principal(o1, o2);
  WhittakerEvaluator w2(pr, true, 0, digits);
  WhittakerEvaluator w3(make_steinberg(p, 1), false, 0, digits);
  const int M = 2;  // corner level: max(m, conductor3 + translate, 1)
  std::vector<Rat64> weights = corner_weights(p, M);
  cplx total{0.0, 0.0};
  for (int j = 0; j <= M; ++j) {
    Mat2 cj = mat_corner(p, j, digits);
    cplx corner_sum{0.0, 0.0};
    for (int r = -3; r <= 22; ++r) {
      int depth = std::max(m, -r) + 3;
      corner_sum += rat_pow(p, r).to_double() *
                    integrate_mult_shell(p, r, depth, [&](const Zp& y) {
                      // The quadrature hands out samples carrying only the
                      // cell depth; the defining integrals burn digits, and
                      // the integrand is constant on the cells, so lift the
                      // representative to the full budget.
                      Zp yl = Zp::from_unit(
                          p, r, static_cast<std::int64_t>(y.unit_mod(depth)),
                          digits);
                      Mat2 g = mat_a(yl) * cj;
                      cplx sec =
                          eval_newform_induced(pr, decompose_corner(g, m));
                      if (std::abs(sec) == 0.0) return cplx{0.0, 0.0};
                      return sec * w2.bruteforce(g) * w3.bruteforce(g);
                    });
    }
    total += weights[static_cast<size_t>(j)].to_double() * corner_sum;
  }
  total *= std::sqrt(z1(p));
  CHECK(std::abs(total - closed) < 1e-4);
}

TEST_CASE("the normalized constant ignores gauge choices") {
  std::mt19937_64 rng(8);
  const std::int64_t p = 3;
  const int m = 2;
  UnitChar u = UnitChar::random_with_conductor(p, m, rng);
  MultChar o2 = MultChar::unramified(p, 1.0, Angle(1, 3));

  // Changing omega1's value at the uniformizer moves the bilinear forms'
  // phases but never the constant.
  MultChar o1a{u, 1.0, Angle(1, 5)};
  MultChar o1b{u, 1.0, Angle(3, 7)};
  TripleEngine ea(make_steinberg_triple(p, m, o1a, o2, -1, 0, 0));
  TripleEngine eb(make_steinberg_triple(p, m, o1b, o2, -1, 0, 0));
  cplx ia = ea.local_I_prime(0, 0).bruteforce;
  cplx ib = eb.local_I_prime(0, 0).bruteforce;
  CHECK(std::abs(ia - ib) < 1e-10);

  // Same for omega2.
  MultChar o2b = MultChar::unramified(p, 1.0, Angle(2, 9));
  TripleEngine ec(make_steinberg_triple(p, m, o1a, o2b, -1, 0, 0));
  CHECK(std::abs(ia - ec.local_I_prime(0, 0).bruteforce) < 1e-10);

  // The spherical factor only sees the unordered parameter pair.
  MultChar o3 = MultChar::unramified(p, 1.0, Angle(1, 7));
  TripleEngine ed(make_spherical_triple(p, m, o1a, o2, o3, 0, 0));
  TripleEngine ee(make_spherical_triple(p, m, o1a, o2, o3.inverse(), 0, 0));
  CHECK(std::abs(ed.local_I_prime(0, 0).bruteforce -
                 ee.local_I_prime(0, 0).bruteforce) < 1e-10);
}

TEST_CASE("principal matrix coefficient: table versus torus sums") {
  std::mt19937_64 rng(9);
  const std::int64_t p = 3;
  const int m = 2;
  const int digits = 14;
  MultChar o1 = ramified(p, m, rng);
  MultChar o2 = unram(p, rng);
  InducedRepSpec pr = make_principal(o1, o2);
  WhittakerEvaluator ev(pr, false, 0, digits);
  WhittakerEvaluator evd(pr, true, 0, digits);

  const double t_unit = z2(p) / z1(p);
  CHECK(std::abs(mc_principal_tsum(ev, mat_identity(p, digits)) -
                 cplx{t_unit, 0.0}) < 1e-12);
  CHECK(std::abs(mc_principal_tsum(evd, mat_identity(p, digits)) -
                 cplx{t_unit, 0.0}) < 1e-12);

  int points = 0;
  for (int j : {0, 1, 2}) {
    Mat2 cj = mat_corner(p, j, digits);
    for (int vx : {-4, -2, -1, 0, 1, 99}) {
      Zp x = vx == 99 ? Zp::exact_zero(p)
                      : unit_shell(p, vx,
                                   1 + 3 * static_cast<std::int64_t>(
                                               rng() % 50),
                                   digits);
      for (int vy : {-3, -1, 0, 2}) {
        Zp y = unit_shell(
            p, vy, 1 + 3 * static_cast<std::int64_t>(rng() % 50), digits);
        Mat2 g = mat_n(x) * mat_a(y) * cj;
        cplx table = mc_principal_table(pr, x, y, j);
        cplx from_tsum = mc_principal_tsum(ev, g) / t_unit;
        CHECK(std::abs(from_tsum - table) < 1e-10);
        // The dual pair gives the conjugate coefficient.
        cplx from_dual = mc_principal_tsum(evd, g) / t_unit;
        CHECK(std::abs(from_dual - std::conj(table)) < 1e-10);
        ++points;
      }
    }
  }
  CHECK(points >= 60);
}

TEST_CASE("supercuspidal matrix coefficient: torus sums behave") {
  std::mt19937_64 rng(10);
  const std::int64_t p = 2;
  const int c = 2;
  const int digits = 16;
  EpsilonData eps(p, c, 1, 21);
  for (int l : {0, 1}) {
    SupercuspidalEvaluator ev(eps, false, l, digits);
    SupercuspidalEvaluator evd(eps, true, l, digits);
    // T(1) is the diagonal pairing: the newform norm, 1.
    cplx t1 = mc_supercuspidal_tsum(ev, evd, mat_identity(p, digits));
    CHECK(std::abs(t1 - cplx{1.0, 0.0}) < 1e-10);

    // Symbolic versus numeric: the dual translate confines the torus to one
    // shell, where the plain factor can be integrated directly.
    for (int j : {0, 1, 2}) {
      Mat2 cj = mat_corner(p, j, digits);
      for (int vx : {-2, 0}) {
        for (int vy : {-2, -1, 0, 1}) {
          Zp x = unit_shell(p, vx, 1 + 2 * static_cast<std::int64_t>(
                                           rng() % 60),
                            digits);
          Zp y = unit_shell(p, vy, 1 + 2 * static_cast<std::int64_t>(
                                           rng() % 60),
                            digits);
          Mat2 g = mat_n(x) * mat_a(y) * cj;
          cplx symbolic = mc_supercuspidal_tsum(ev, evd, g);
          const int depth = c + l + 4;
          cplx numeric = integrate_mult_shell(
              p, l, depth, [&](const Zp& t) {
                // Lift the sample to the evaluator's digit budget; the
                // integrand is constant on the quadrature cells.
                Zp tl = Zp::from_unit(
                    p, l, static_cast<std::int64_t>(t.unit_mod(depth)),
                    digits);
                return ev.at(mat_a(tl) * g);
              });
          CHECK(std::abs(symbolic - numeric) < 1e-10);
        }
      }
    }

    // Central elements and the right invariance level are invisible.
    Mat2 g = mat_n(unit_shell(p, -1, 1, digits)) *
             mat_a(unit_shell(p, -1, 3, digits)) * mat_corner(p, 1, digits);
    cplx base = mc_supercuspidal_tsum(ev, evd, g);
    Mat2 z = mat_z(unit_shell(p, 1, 3, digits));
    CHECK(std::abs(mc_supercuspidal_tsum(ev, evd, z * g) - base) < 1e-10);
    Mat2 k = random_k1(p, c + l, digits, rng);
    CHECK(std::abs(mc_supercuspidal_tsum(ev, evd, g * k) - base) < 1e-10);
  }
}

TEST_CASE("matrix coefficient route equals the bilinear route") {
  std::mt19937_64 rng(11);
  const std::int64_t p = 2;
  const int m = 2;
  MultChar o1 = ramified(p, m, rng);
  MultChar o2 = unram(p, rng);
  auto eps = std::make_shared<const EpsilonData>(p, 2, 1, 23);
  TripleSpec spec = make_supercuspidal_triple(p, m, o1, o2, eps, false, 0, 0);

  cplx mc = matrix_coefficient_I(spec);
  CHECK(std::abs(mc - cplx{1.0 / 6.0, 0.0}) < 1e-9);

  TripleEngine engine(spec);
  Norms n = engine.norms();
  cplx ipath = engine.local_I(0, 0) / (n.n1 * n.n2 * n.n3);
  CHECK(std::abs(mc - ipath) < 1e-9);

  // Outside the tabulated range the route refuses to run.
  TripleSpec off = spec;
  off.l1 = off.l2 = 1;  // beyond m - c = 0
  CHECK_THROWS_AS((void)matrix_coefficient_I(off), std::domain_error);
  std::mt19937_64 rng2(12);
  MultChar w1 = ramified(p, 4, rng2);
  auto eps4 = std::make_shared<const EpsilonData>(p, 4, 1, 25);
  TripleSpec c4 = make_supercuspidal_triple(p, 4, w1, o2, eps4, false, 0, 0);
  CHECK_THROWS_AS((void)matrix_coefficient_I(c4), std::domain_error);
}

TEST_CASE("newform norms") {
  std::mt19937_64 rng(13);
  const std::int64_t p = 3;
  MultChar o1 = ramified(p, 2, rng);
  MultChar o2 = unram(p, rng);
  double expect12 = z2(p) / z1(p);

  TripleEngine st(make_steinberg_triple(p, 2, o1, o2, -1, 0, 0));
  Norms ns = st.norms();
  CHECK(std::abs(ns.n1 - cplx{expect12, 0.0}) < 1e-10);
  CHECK(std::abs(ns.n2 - cplx{expect12, 0.0}) < 1e-10);
  CHECK(std::abs(ns.n3 - cplx{1.0, 0.0}) < 1e-10);

  TripleEngine sph(make_spherical_triple(p, 2, o1, o2, unram(p, rng), 0, 0));
  CHECK(std::abs(sph.norms().n3 - cplx{1.0, 0.0}) < 1e-12);

  auto eps = std::make_shared<const EpsilonData>(p, 2, -1, 29);
  TripleEngine sc(make_supercuspidal_triple(p, 2, o1, o2, eps, false, 0, 0));
  CHECK(std::abs(sc.norms().n3 - cplx{1.0, 0.0}) < 1e-10);
}

TEST_CASE("constants over the proven translate range only") {
  std::mt19937_64 rng(14);
  const std::int64_t p = 3;
  MultChar o1 = ramified(p, 2, rng);
  MultChar o2 = unram(p, rng);
  TripleEngine st(make_steinberg_triple(p, 2, o1, o2, 1, 0, 0));
  // max translate for this spec is 1.
  CHECK_THROWS_AS((void)st.local_I_prime(2, 0), std::domain_error);
  IPrimePair ext = st.local_I_prime(2, 0, true);
  CHECK(std::abs(ext.closed) > 0.0);
  // Inside the range, the product structure holds.
  cplx i01 = st.local_I(0, 1);
  CHECK(std::abs(i01 - st.ell(Side::Plain, 0) * st.ell(Side::Tilde, 1)) <
        1e-14);
  IPrimePair ok = st.local_I_prime(0, 1);
  CHECK(ok.abs_err < 1e-9);
}
