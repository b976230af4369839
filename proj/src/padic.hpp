// p-adic scalars with explicit precision tracking, 2x2 matrices over them,
// and the corner decomposition of GL2 against the level subgroup K1(p^m).
//
// A scalar is either an exact zero, a "bounded zero" (only known to lie in
// p^vmin * O, the outcome of catastrophic cancellation), or a regular value
// u * p^v with the unit u carried modulo p^N.  Arithmetic propagates the
// number of trustworthy unit digits; when a regular result would keep fewer
// digits than the configured floor we throw PrecisionError instead of
// silently degrading, so callers can rerun at higher working precision.

#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace tpl {

struct PrecisionError : std::runtime_error {
  explicit PrecisionError(const std::string& what) : std::runtime_error(what) {}
};

// Minimum unit digits a regular value may keep.  The default floor is 2 and
// may be overridden once per process through the PRECISION_FLOOR environment
// variable.
int precision_floor();

// p^k as uint64; the table is capped so products of two entries fit __int128
// comfortably and a single entry stays below 2^60.
std::uint64_t pow_u64(std::int64_t p, int k);

// Largest exponent N with p^N <= 2^60.
int max_digits(std::int64_t p);

std::uint64_t inverse_mod_u64(std::uint64_t a, std::uint64_t m);

class Zp {
 public:
  enum class State { ExactZero, BoundedZero, Regular };

  Zp() = default;

  static Zp exact_zero(std::int64_t p) {
    Zp x;
    x.p_ = p;
    x.state_ = State::ExactZero;
    return x;
  }
  static Zp bounded_zero(std::int64_t p, int vmin) {
    Zp x;
    x.p_ = p;
    x.state_ = State::BoundedZero;
    x.v_ = vmin;
    return x;
  }
  // u * p^v with u given as any integer coprime to p; kept mod p^N.
  static Zp from_unit(std::int64_t p, int v, std::int64_t u, int N);
  // An ordinary integer (v extracted, remaining unit kept mod p^N).
  static Zp from_int(std::int64_t p, std::int64_t n, int N);
  // p^e (exact unit 1).
  static Zp from_pow(std::int64_t p, int e, int N) {
    return from_unit(p, e, 1, N);
  }

  std::int64_t prime() const { return p_; }
  State state() const { return state_; }
  bool is_exact_zero() const { return state_ == State::ExactZero; }
  bool is_bounded() const { return state_ == State::BoundedZero; }
  bool is_regular() const { return state_ == State::Regular; }

  // Valuation of a regular value; PrecisionError for a bounded zero, and a
  // logic error for the exact zero (callers must branch on it first).
  int valuation() const {
    if (state_ == State::Regular) return v_;
    if (state_ == State::BoundedZero)
      throw PrecisionError("Zp: valuation of a bounded zero is undetermined");
    throw std::logic_error("Zp: valuation of exact zero");
  }
  // Lower bound on the valuation, defined for every state.
  int vmin() const {
    if (state_ == State::ExactZero) return kInfinity;
    return v_;
  }
  int digits() const { return state_ == State::Regular ? N_ : 0; }

  // The unit, reduced mod p^k (k <= digits()).
  std::uint64_t unit_mod(int k) const;
  std::uint64_t unit() const { return unit_mod(N_); }

  friend Zp operator+(const Zp& a, const Zp& b);
  friend Zp operator-(const Zp& a, const Zp& b);
  friend Zp operator*(const Zp& a, const Zp& b);
  friend Zp operator/(const Zp& a, const Zp& b);
  Zp operator-() const;
  Zp inverse() const;

  // Multiply by p^e (exact valuation shift).
  Zp shifted(int e) const {
    Zp r = *this;
    if (r.state_ != State::ExactZero) r.v_ += e;
    return r;
  }

  // Whether a - b is known to lie in p^k * O.
  static bool congruent(const Zp& a, const Zp& b, int k);

  static constexpr int kInfinity = std::numeric_limits<int>::max() / 2;

 private:
  std::int64_t p_ = 0;
  State state_ = State::ExactZero;
  int v_ = 0;          // valuation (Regular) or vmin (BoundedZero)
  std::uint64_t u_ = 0;  // unit mod p^N (Regular only), coprime to p
  int N_ = 0;          // trustworthy unit digits (Regular only)

  static void check_same_prime(const Zp& a, const Zp& b);
  static Zp regular(std::int64_t p, int v, std::uint64_t u, int N);
};

struct Mat2 {
  Zp a, b, c, d;  // ( a b ; c d )

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return Mat2{x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  Zp det() const { return a * d - b * c; }
  Mat2 inverse() const {
    Zp di = det().inverse();
    return Mat2{d * di, (-b) * di, (-c) * di, a * di};
  }
};

// Standard elements.  N is the unit-digit budget for fresh entries.
Mat2 mat_identity(std::int64_t p, int N);
Mat2 mat_n(const Zp& b);                       // ( 1 b ; 0 1 )
Mat2 mat_lower(const Zp& c);                   // ( 1 0 ; c 1 )
Mat2 mat_a(const Zp& y);                       // ( y 0 ; 0 1 )
Mat2 mat_z(const Zp& z);                       // ( z 0 ; 0 z )
Mat2 mat_diag(const Zp& x, const Zp& y);       // ( x 0 ; 0 y )
Mat2 mat_w(std::int64_t p, int N);             // ( 0 1 ; -1 0 )
Mat2 mat_corner(std::int64_t p, int j, int N);  // ( 1 0 ; p^j 1 )

// g = (bA bB; 0 bD) * (1 0; p^j 1) * k  with j in [0, m] and k in K1(p^m)
// (entries integral, unit determinant, bottom row congruent to (0 1) mod
// p^m).  Total on GL2: j = 0 exactly when the bottom-left entry dominates the
// bottom row, j = min(m, v(c/d)) otherwise.
struct CornerDecomposition {
  Zp bA, bB, bD;
  int j = 0;
  Mat2 k;
};

CornerDecomposition decompose_corner(const Mat2& g, int m);

}  // namespace tpl
