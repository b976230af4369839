#include "padic.hpp"

#include <cstdlib>

namespace tpl {

int precision_floor() {
  static const int floor_value = [] {
    if (const char* env = std::getenv("PRECISION_FLOOR")) {
      int v = std::atoi(env);
      if (v >= 1) return v;
    }
    return 2;
  }();
  return floor_value;
}

std::uint64_t pow_u64(std::int64_t p, int k) {
  if (k < 0) throw std::domain_error("pow_u64: negative exponent");
  const std::uint64_t cap = std::uint64_t{1} << 60;
  std::uint64_t r = 1;
  for (int i = 0; i < k; ++i) {
    if (r > cap / static_cast<std::uint64_t>(p))
      throw std::overflow_error("pow_u64: p^k exceeds the 2^60 cap");
    r *= static_cast<std::uint64_t>(p);
  }
  return r;
}

int max_digits(std::int64_t p) {
  int n = 0;
  const std::uint64_t cap = std::uint64_t{1} << 60;
  std::uint64_t r = 1;
  while (r <= cap / static_cast<std::uint64_t>(p)) {
    r *= static_cast<std::uint64_t>(p);
    ++n;
  }
  return n;
}

std::uint64_t inverse_mod_u64(std::uint64_t a, std::uint64_t m) {
  // Extended Euclid over signed 128-bit.
  __int128 r0 = static_cast<__int128>(m), r1 = static_cast<__int128>(a % m);
  __int128 s0 = 0, s1 = 1;
  while (r1 != 0) {
    __int128 q = r0 / r1;
    __int128 r2 = r0 - q * r1;
    r0 = r1; r1 = r2;
    __int128 s2 = s0 - q * s1;
    s0 = s1; s1 = s2;
  }
  if (r0 != 1) throw std::domain_error("inverse_mod_u64: not invertible");
  __int128 s = s0 % static_cast<__int128>(m);
  if (s < 0) s += static_cast<__int128>(m);
  return static_cast<std::uint64_t>(s);
}

void Zp::check_same_prime(const Zp& a, const Zp& b) {
  if (a.p_ != b.p_) throw std::logic_error("Zp: mixed primes");
}

Zp Zp::regular(std::int64_t p, int v, std::uint64_t u, int N) {
  if (N < precision_floor())
    throw PrecisionError("Zp: only " + std::to_string(N) +
                         " unit digits left (floor " +
                         std::to_string(precision_floor()) + ")");
  Zp x;
  x.p_ = p;
  x.state_ = State::Regular;
  x.v_ = v;
  x.N_ = std::min(N, max_digits(p));
  x.u_ = u % pow_u64(p, x.N_);
  return x;
}

Zp Zp::from_unit(std::int64_t p, int v, std::int64_t u, int N) {
  if (u % p == 0) throw std::domain_error("Zp::from_unit: unit divisible by p");
  N = std::min(N, max_digits(p));
  std::uint64_t M = pow_u64(p, N);
  __int128 uu = static_cast<__int128>(u) % static_cast<__int128>(M);
  if (uu < 0) uu += static_cast<__int128>(M);
  return regular(p, v, static_cast<std::uint64_t>(uu), N);
}

Zp Zp::from_int(std::int64_t p, std::int64_t n, int N) {
  if (n == 0) return exact_zero(p);
  int v = 0;
  while (n % p == 0) { n /= p; ++v; }
  return from_unit(p, v, n, N);
}

std::uint64_t Zp::unit_mod(int k) const {
  if (state_ != State::Regular)
    throw std::logic_error("Zp: unit of a non-regular value");
  if (k > N_)
    throw PrecisionError("Zp: unit requested mod p^" + std::to_string(k) +
                         " but only " + std::to_string(N_) + " digits held");
  return u_ % pow_u64(p_, k);
}

Zp operator+(const Zp& a, const Zp& b) {
  Zp::check_same_prime(a, b);
  using State = Zp::State;
  if (a.state_ == State::ExactZero) return b;
  if (b.state_ == State::ExactZero) return a;
  if (a.state_ == State::BoundedZero || b.state_ == State::BoundedZero) {
    // x + (something in p^k O): regular if x pokes out below k.
    if (a.state_ == State::BoundedZero && b.state_ == State::BoundedZero)
      return Zp::bounded_zero(a.p_, std::min(a.v_, b.v_));
    const Zp& reg = a.state_ == State::Regular ? a : b;
    const Zp& bnd = a.state_ == State::Regular ? b : a;
    if (reg.v_ < bnd.v_) {
      int N = std::min(reg.N_, bnd.v_ - reg.v_);
      return Zp::regular(reg.p_, reg.v_, reg.u_ % pow_u64(reg.p_, N), N);
    }
    return Zp::bounded_zero(a.p_, bnd.v_);
  }
  // Both regular.  Absolute precision of the sum is the weaker of the two.
  int abs_prec = std::min(a.v_ + a.N_, b.v_ + b.N_);
  int v = std::min(a.v_, b.v_);
  int N = abs_prec - v;
  std::uint64_t M = pow_u64(a.p_, N);
  auto term = [&](const Zp& x) -> __int128 {
    if (x.v_ - v >= N) return 0;
    return (static_cast<__int128>(x.u_ % M) * pow_u64(a.p_, x.v_ - v)) %
           static_cast<__int128>(M);
  };
  __int128 s = (term(a) + term(b)) % static_cast<__int128>(M);
  std::uint64_t su = static_cast<std::uint64_t>(s);
  if (su == 0) return Zp::bounded_zero(a.p_, v + N);
  int k = 0;
  while (su % static_cast<std::uint64_t>(a.p_) == 0) {
    su /= static_cast<std::uint64_t>(a.p_);
    ++k;
  }
  return Zp::regular(a.p_, v + k, su, N - k);
}

Zp Zp::operator-() const {
  if (state_ != State::Regular) return *this;
  std::uint64_t M = pow_u64(p_, N_);
  Zp r = *this;
  r.u_ = (M - u_) % M;
  return r;
}

Zp operator-(const Zp& a, const Zp& b) { return a + (-b); }

Zp operator*(const Zp& a, const Zp& b) {
  Zp::check_same_prime(a, b);
  using State = Zp::State;
  if (a.state_ == State::ExactZero || b.state_ == State::ExactZero)
    return Zp::exact_zero(a.p_);
  if (a.state_ == State::BoundedZero || b.state_ == State::BoundedZero)
    return Zp::bounded_zero(a.p_, a.v_ + b.v_);
  int N = std::min(a.N_, b.N_);
  std::uint64_t M = pow_u64(a.p_, N);
  std::uint64_t u = static_cast<std::uint64_t>(
      (static_cast<__int128>(a.u_ % M) * (b.u_ % M)) %
      static_cast<__int128>(M));
  return Zp::regular(a.p_, a.v_ + b.v_, u, N);
}

Zp Zp::inverse() const {
  if (state_ == State::ExactZero)
    throw std::domain_error("Zp: inverse of exact zero");
  if (state_ == State::BoundedZero)
    throw PrecisionError("Zp: inverse of a bounded zero");
  std::uint64_t M = pow_u64(p_, N_);
  return regular(p_, -v_, inverse_mod_u64(u_, M), N_);
}

Zp operator/(const Zp& a, const Zp& b) { return a * b.inverse(); }

bool Zp::congruent(const Zp& a, const Zp& b, int k) {
  Zp d = a - b;
  return d.vmin() >= k;
}

Mat2 mat_identity(std::int64_t p, int N) {
  Zp one = Zp::from_int(p, 1, N);
  Zp zero = Zp::exact_zero(p);
  return Mat2{one, zero, zero, one};
}
Mat2 mat_n(const Zp& b) {
  std::int64_t p = b.prime();
  int N = std::max(b.digits(), precision_floor() + 2);
  Zp one = Zp::from_int(p, 1, std::max(N, 4));
  return Mat2{one, b, Zp::exact_zero(p), one};
}
Mat2 mat_lower(const Zp& c) {
  std::int64_t p = c.prime();
  int N = std::max(c.digits(), precision_floor() + 2);
  Zp one = Zp::from_int(p, 1, std::max(N, 4));
  return Mat2{one, Zp::exact_zero(p), c, one};
}
Mat2 mat_a(const Zp& y) {
  std::int64_t p = y.prime();
  int N = std::max(y.digits(), precision_floor() + 2);
  Zp one = Zp::from_int(p, 1, std::max(N, 4));
  return Mat2{y, Zp::exact_zero(p), Zp::exact_zero(p), one};
}
Mat2 mat_z(const Zp& z) {
  std::int64_t p = z.prime();
  return Mat2{z, Zp::exact_zero(p), Zp::exact_zero(p), z};
}
Mat2 mat_diag(const Zp& x, const Zp& y) {
  std::int64_t p = x.prime();
  return Mat2{x, Zp::exact_zero(p), Zp::exact_zero(p), y};
}
Mat2 mat_w(std::int64_t p, int N) {
  Zp one = Zp::from_int(p, 1, N);
  return Mat2{Zp::exact_zero(p), one, -one, Zp::exact_zero(p)};
}
Mat2 mat_corner(std::int64_t p, int j, int N) {
  Zp one = Zp::from_int(p, 1, N);
  return Mat2{one, Zp::exact_zero(p), Zp::from_pow(p, j, N), one};
}

CornerDecomposition decompose_corner(const Mat2& g, int m) {
  if (m < 0) throw std::domain_error("decompose_corner: negative level");
  const std::int64_t p = g.d.prime();
  const Zp det = g.det();
  if (det.is_exact_zero() || det.is_bounded())
    throw std::domain_error("decompose_corner: determinant not a unit times p^k");

  // Which bottom-row entry dominates?  Bottom-left dominance (v(c) <= v(d))
  // is the j = 0 cell; otherwise j is v(c/d) clipped to m.
  const Zp& c = g.c;
  const Zp& d = g.d;
  bool c_dominant;
  if (c.is_exact_zero()) {
    c_dominant = false;
  } else if (c.is_bounded()) {
    if (d.is_exact_zero() || (d.is_regular() && c.vmin() > d.valuation()))
      c_dominant = false;
    else
      throw PrecisionError("decompose_corner: bottom row dominance undecidable");
  } else if (d.is_exact_zero()) {
    c_dominant = true;
  } else if (d.is_bounded()) {
    // v(d) >= vmin(d) >= v(c) already forces bottom-left dominance.
    if (c.valuation() <= d.vmin())
      c_dominant = true;
    else
      throw PrecisionError("decompose_corner: bottom row dominance undecidable");
  } else {
    c_dominant = c.valuation() <= d.valuation();
  }

  CornerDecomposition out;
  if (c_dominant) {
    // g = (det/c, b - a z; 0, c) * (1 0; 1 1) * (1 z; 0 1),  z = d/c - 1.
    Zp z = d / c - Zp::from_int(p, 1, std::max(c.digits(), 4));
    out.j = 0;
    out.bD = c;
    out.bA = det / c;
    out.bB = g.b - g.a * z;
    out.k = mat_n(z);
    return out;
  }

  // d dominates: g = (det/d, b; 0, d) * (1 0; u 1), u = c/d, v(u) >= 1.
  Zp u = c.is_exact_zero() ? Zp::exact_zero(p) : c / d;
  int r = u.is_exact_zero() ? Zp::kInfinity : u.vmin();
  if (m == 0) {
    // Single corner (1 0; 1 1):  (1 0; u 1) = (1 0; 1 1)(1 0; u-1 1) and the
    // residual factor is in K = K1(p^0).
    out.j = 0;
    out.bA = det / d;
    out.bB = g.b;
    out.bD = d;
    // The constant is exact, so it must carry at least u's budget: the
    // subtraction can cancel deeply when u is congruent to 1, and a short
    // constant would truncate the certified digits of the residual.
    Zp um1 = u - Zp::from_int(p, 1, std::max(u.digits(), 8));
    out.k = mat_lower(um1);
    return out;
  }
  if (r >= m) {
    // (1 0; u 1) is already in K1(p^m); report the trivial corner j = m.
    out.j = m;
    out.bA = det / d;
    out.bB = g.b;
    out.bD = d;
    // Same budget rule as above: u - p^m cancels deeply whenever u sits in
    // the cell of p^m, and the exact constant must not cap the precision.
    Zp shift =
        u - Zp::from_pow(p, m,
                         std::max({u.digits(), precision_floor() + 2, 8}));
    out.k = mat_lower(shift);
    return out;
  }
  if (!u.is_regular())
    throw PrecisionError("decompose_corner: corner depth undecidable");
  // 1 <= r < m:  (1 0; e p^r 1) = diag(e^-1,1) (1 0; p^r 1) diag(e,1).
  int N = u.digits();
  Zp eps = Zp::from_unit(p, 0, static_cast<std::int64_t>(u.unit()), N);
  out.j = r;
  out.bA = det / (d * eps);
  out.bB = g.b;
  out.bD = d;
  out.k = mat_diag(eps, Zp::from_int(p, 1, N));
  return out;
}

}  // namespace tpl
