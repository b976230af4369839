#include <random>

#include "doctest.h"
#include "padic.hpp"

using namespace tpl;

namespace {

// a - b lies in p^k * O (exact zero counts).
bool close_mod(const Zp& a, const Zp& b, int k) {
  Zp d = a - b;
  if (d.is_exact_zero()) return true;
  return d.vmin() >= k;
}

Zp rand_point(std::int64_t p, int vlo, int vhi, int digits,
              std::mt19937_64& rng) {
  int v = vlo + static_cast<int>(rng() % static_cast<unsigned>(vhi - vlo + 1));
  std::int64_t u = static_cast<std::int64_t>(rng() % 1000) * p + 1 +
                   static_cast<std::int64_t>(rng() % (p - 1 > 0 ? p - 1 : 1));
  if (u % p == 0) ++u;
  return Zp::from_unit(p, v, u, digits);
}

}  // namespace

TEST_CASE("scalar construction and valuation") {
  Zp x = Zp::from_int(5, 250, 10);  // 250 = 2 * 5^3
  CHECK(x.is_regular());
  CHECK(x.valuation() == 3);
  CHECK(x.unit_mod(1) == 2);

  Zp z = Zp::exact_zero(3);
  CHECK(z.is_exact_zero());
  CHECK(z.vmin() == Zp::kInfinity);
  CHECK_THROWS_AS((void)Zp::bounded_zero(3, 2).valuation(), PrecisionError);

  Zp mone = Zp::from_int(7, -1, 6);
  CHECK(mone.valuation() == 0);
  CHECK(mone.unit_mod(1) == 6);
}

TEST_CASE("arithmetic tracks precision") {
  std::mt19937_64 rng(11);
  for (std::int64_t p : {2, 3, 5}) {
    for (int rep = 0; rep < 50; ++rep) {
      Zp a = rand_point(p, -3, 3, 14, rng);
      Zp b = rand_point(p, -3, 3, 14, rng);
      // Ring identities hold to the tracked precision.
      CHECK(close_mod(a + b, b + a, a.vmin() + 8));
      CHECK(close_mod(a * b, b * a, a.vmin() + b.vmin() + 8));
      CHECK(close_mod((a + b) * a, a * a + b * a,
                      2 * std::min(a.vmin(), b.vmin()) + 8));
      // Subtracting a value from itself leaves only a bounded zero.
      Zp d = a - a;
      CHECK(!d.is_regular());
      CHECK(d.vmin() >= a.valuation() + 10);
      // Inversion round-trips.
      Zp inv = a.inverse();
      CHECK(close_mod(a * inv, Zp::from_int(p, 1, 14), 8));
    }
  }
}

TEST_CASE("congruence predicate") {
  Zp a = Zp::from_unit(3, 0, 1, 8);
  Zp b = Zp::from_unit(3, 0, 1 + 27, 8);
  CHECK(Zp::congruent(a, b, 3));
  CHECK(!Zp::congruent(a, b, 4));
  CHECK(Zp::congruent(a, a, 8));
}

TEST_CASE("matrix algebra") {
  std::mt19937_64 rng(7);
  const std::int64_t p = 3;
  const int digits = 12;
  for (int rep = 0; rep < 30; ++rep) {
    Mat2 g = mat_n(rand_point(p, -2, 2, digits, rng)) *
             mat_diag(rand_point(p, -2, 2, digits, rng),
                      rand_point(p, -2, 2, digits, rng)) *
             mat_lower(rand_point(p, 0, 3, digits, rng));
    Mat2 h = g * g.inverse();
    CHECK(close_mod(h.a, Zp::from_int(p, 1, digits), 4));
    CHECK(close_mod(h.d, Zp::from_int(p, 1, digits), 4));
    // The off-diagonal entries cancel to the working precision: no certified
    // nonzero digit may survive.  How deep the floor sits depends on the
    // valuations drawn, so only its sign is stable.
    CHECK(!h.b.is_regular());
    CHECK(!h.c.is_regular());
    CHECK(h.b.vmin() >= 0);
    CHECK(h.c.vmin() >= 0);
  }
  Mat2 w = mat_w(p, digits);
  Mat2 w2 = w * w;
  CHECK(close_mod(w2.a, Zp::from_int(p, -1, digits), 6));
  CHECK(close_mod(w2.d, Zp::from_int(p, -1, digits), 6));
}

TEST_CASE("corner decomposition reconstructs the point") {
  std::mt19937_64 rng(23);
  for (std::int64_t p : {2, 3, 5}) {
    for (int m : {1, 2, 3}) {
      const int digits = 14;
      for (int rep = 0; rep < 40; ++rep) {
        Mat2 g = mat_n(rand_point(p, -2, 2, digits, rng)) *
                 mat_diag(rand_point(p, -2, 2, digits, rng),
                          rand_point(p, -2, 2, digits, rng)) *
                 mat_lower(rand_point(p, 0, m + 2, digits, rng));
        CornerDecomposition dec = decompose_corner(g, m);
        CHECK(dec.j >= 0);
        CHECK(dec.j <= m);
        // k lands in K1(p^m): integral entries, unit determinant, bottom row
        // congruent to (0 1).
        CHECK(dec.k.a.vmin() >= 0);
        CHECK(dec.k.b.vmin() >= 0);
        CHECK(dec.k.c.vmin() >= m);
        CHECK(close_mod(dec.k.d, Zp::from_int(p, 1, digits), m));
        CHECK(dec.k.det().valuation() == 0);
        // B * corner_j * k reproduces g.
        Mat2 B{dec.bA, dec.bB, Zp::exact_zero(p), dec.bD};
        Mat2 r = B * mat_corner(p, dec.j, digits) * dec.k;
        CHECK(close_mod(r.a, g.a, g.a.vmin() + 3));
        CHECK(close_mod(r.b, g.b, g.b.vmin() + 3));
        CHECK(close_mod(r.c, g.c, g.c.vmin() + 3));
        CHECK(close_mod(r.d, g.d, g.d.vmin() + 3));
      }
    }
  }
}

TEST_CASE("corner cell selection follows the bottom row") {
  const std::int64_t p = 5;
  const int m = 2;
  const int digits = 12;
  // Bottom row (p^j, 1): cell j (clipped at m).
  for (int j = 0; j <= m + 2; ++j) {
    Mat2 g = mat_corner(p, j, digits);
    CHECK(decompose_corner(g, m).j == std::min(j, m));
  }
  // Dominant bottom-left entry: cell 0.
  Mat2 g{Zp::from_int(p, 1, digits), Zp::exact_zero(p),
         Zp::from_unit(p, -1, 1, digits), Zp::from_int(p, 1, digits)};
  CHECK(decompose_corner(g, m).j == 0);
}
