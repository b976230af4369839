#include "haar.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace tpl {

cplx integrate_additive_shell(std::int64_t p, int r, int depth, const ZpFn& f) {
  if (depth < 1) throw std::domain_error("integrate_additive_shell: depth >= 1");
  std::uint64_t M = pow_u64(p, depth);
  Rat64 w = rat_pow(p, -(depth + r));
  double wd = w.to_double();
  cplx total{0.0, 0.0};
  for (std::uint64_t u = 1; u < M; ++u) {
    if (u % static_cast<std::uint64_t>(p) == 0) continue;
    total += f(Zp::from_unit(p, r, static_cast<std::int64_t>(u), depth)) * wd;
  }
  return total;
}

cplx integrate_mult_shell(std::int64_t p, int r, int depth, const ZpFn& f) {
  if (depth < 1) throw std::domain_error("integrate_mult_shell: depth >= 1");
  std::uint64_t M = pow_u64(p, depth);
  Rat64 w = Rat64{1} / (Rat64{p - 1} * rat_pow(p, depth - 1));
  double wd = w.to_double();
  cplx total{0.0, 0.0};
  for (std::uint64_t u = 1; u < M; ++u) {
    if (u % static_cast<std::uint64_t>(p) == 0) continue;
    total += f(Zp::from_unit(p, r, static_cast<std::int64_t>(u), depth)) * wd;
  }
  return total;
}

Rat64 addchar_additive_closed(std::int64_t p, int m) {
  if (m >= 0) return rat_pow(p, -m) * (Rat64{1} - Rat64{1, p});
  if (m == -1) return Rat64{-1};
  return Rat64{0};
}

Rat64 addchar_additive_exact(std::int64_t p, int m, int depth) {
  if (depth < std::max(1, -m))
    throw std::domain_error("addchar_additive_exact: depth too shallow");
  std::uint64_t M = pow_u64(p, depth);
  Rat64 w = rat_pow(p, -(depth + m));
  if (m >= 0) {
    // psi is 1 on the whole shell; the value is just its volume.
    Rat64 count{0};
    for (std::uint64_t u = 1; u < M; ++u)
      if (u % static_cast<std::uint64_t>(p) != 0) count += Rat64{1};
    return count * w;
  }
  // Each class contributes w * zeta^{u mod p^{-m}} with zeta of order p^{-m}.
  PrimePowerCyclotomic sum(p, -m);
  std::uint64_t D = pow_u64(p, -m);
  for (std::uint64_t u = 1; u < M; ++u) {
    if (u % static_cast<std::uint64_t>(p) == 0) continue;
    sum.add_root(static_cast<std::int64_t>(u % D), w);
  }
  if (!sum.is_rational())
    throw std::logic_error("addchar_additive_exact: sum not rational");
  return sum.rational_part();
}

Rat64 addchar_mult_closed(std::int64_t p, int vb) {
  if (vb >= 0) return Rat64{1};
  if (vb == -1) return Rat64{-1, p - 1};
  return Rat64{0};
}

Rat64 addchar_mult_exact(std::int64_t p, int vb, int depth) {
  if (depth < std::max(1, -vb))
    throw std::domain_error("addchar_mult_exact: depth too shallow");
  std::uint64_t M = pow_u64(p, depth);
  Rat64 w = Rat64{1} / (Rat64{p - 1} * rat_pow(p, depth - 1));
  if (vb >= 0) {
    Rat64 count{0};
    for (std::uint64_t u = 1; u < M; ++u)
      if (u % static_cast<std::uint64_t>(p) != 0) count += Rat64{1};
    return count * w;
  }
  PrimePowerCyclotomic sum(p, -vb);
  std::uint64_t D = pow_u64(p, -vb);
  for (std::uint64_t u = 1; u < M; ++u) {
    if (u % static_cast<std::uint64_t>(p) == 0) continue;
    sum.add_root(static_cast<std::int64_t>(u % D), w);
  }
  if (!sum.is_rational())
    throw std::logic_error("addchar_mult_exact: sum not rational");
  return sum.rational_part();
}

std::vector<Rat64> corner_weights(std::int64_t q, int m) {
  if (m < 0) throw std::domain_error("corner_weights: negative level");
  if (m == 0) return {Rat64{1}};
  std::vector<Rat64> A(static_cast<size_t>(m) + 1);
  A[0] = Rat64{q, q + 1};
  for (int j = 1; j < m; ++j)
    A[static_cast<size_t>(j)] = Rat64{q - 1, q + 1} * rat_pow(q, -j);
  A[static_cast<size_t>(m)] = Rat64{q, q + 1} * rat_pow(q, -(m - 1));
  return A;
}

cplx integrate_K(std::int64_t p, int m, int digits, std::mt19937_64& rng,
                 const std::function<cplx(const Mat2&)>& f) {
  if (m < 0) throw std::domain_error("integrate_K: negative level");

  // Coset representatives.  The first column of k modulo p^m, as a point of
  // the projective line, indexes k modulo the congruence subgroup of level
  // m; the lower-right unit then separates K1 inside it.
  std::vector<Mat2> reps;
  if (m == 0) {
    reps.push_back(mat_identity(p, digits));
  } else {
    std::uint64_t M = pow_u64(p, m);
    for (std::uint64_t c = 0; c < M; ++c)
      reps.push_back(mat_lower(Zp::from_int(p, static_cast<std::int64_t>(c),
                                             digits)));
    for (std::uint64_t t = 0; t < M / static_cast<std::uint64_t>(p); ++t) {
      std::int64_t a = static_cast<std::int64_t>(t) * p;
      reps.push_back(Mat2{Zp::from_int(p, a, digits),
                          Zp::from_int(p, -1, digits),
                          Zp::from_int(p, 1, digits),
                          Zp::from_int(p, 0, digits)});
    }
  }

  std::vector<cplx> probes;
  for (size_t i = 0; i < reps.size() && i < 4; ++i)
    probes.push_back(f(reps[i]));
  double scale = 1e-30;
  for (const cplx& v : probes) scale = std::max(scale, std::abs(v));

  // Invariance guard: f must not move under random elements of K1(p^m).
  std::uint64_t R = pow_u64(p, digits);
  auto rand_int = [&](std::uint64_t mod) {
    return static_cast<std::int64_t>(rng() % mod);
  };
  for (int trial = 0; trial < 8; ++trial) {
    std::int64_t b = rand_int(R);
    std::int64_t u = rand_int(R);
    if (u % p == 0) u += 1;
    std::int64_t t = rand_int(R);
    Mat2 k = mat_n(Zp::from_int(p, b, digits)) *
             mat_diag(Zp::from_unit(p, 0, u, digits),
                      Zp::from_int(p, 1, digits));
    if (t != 0)
      k = k * mat_lower(Zp::from_int(p, t, digits).shifted(m));
    size_t idx = static_cast<size_t>(trial) % probes.size();
    cplx moved = f(reps[idx] * k);
    if (std::abs(moved - probes[idx]) > 1e-12 * std::max(scale, 1.0))
      throw std::logic_error(
          "integrate_K: integrand is not right-invariant at this level");
  }

  // Unit representatives for the quotient that separates K1: diag(1, u).
  std::vector<Mat2> units;
  if (m == 0) {
    units.push_back(mat_identity(p, digits));
  } else {
    std::uint64_t M = pow_u64(p, m);
    for (std::uint64_t u = 1; u < M; ++u) {
      if (u % static_cast<std::uint64_t>(p) == 0) continue;
      units.push_back(mat_diag(Zp::from_int(p, 1, digits),
                               Zp::from_unit(p, 0,
                                             static_cast<std::int64_t>(u),
                                             digits)));
    }
  }

  cplx total{0.0, 0.0};
  for (const Mat2& rep : reps)
    for (const Mat2& du : units) total += f(rep * du);
  return total / static_cast<double>(reps.size() * units.size());
}

std::optional<TailLock> tail_lock(const std::vector<cplx>& terms) {
  const size_t K = terms.size();
  double scale = 0.0;
  for (const cplx& t : terms) scale = std::max(scale, std::abs(t));
  if (scale == 0.0) return TailLock{cplx{0.0, 0.0}, 0, true};

  for (int d = 1; d <= 4; ++d) {
    if (K < static_cast<size_t>(2 * d + 4)) break;
    // Solve the d x d system from the FIRST 2d terms.  The windows here are
    // sums of geometric components whose amplitudes can be separated by many
    // orders of magnitude across the window; fitting at the head resolves
    // every component at its largest amplitude, so each root is pinned just
    // accurately enough for its own component, and the one-step residuals
    // stay at machine epsilon of the head scale over the whole window.
    // Fitting at the tail instead amplifies the dominant root's error by the
    // total decay ratio once the recurrence is checked against the head.
    // The singularity guard compares pivots against the entries actually in
    // the system.
    double local = 0.0;
    for (size_t i = 0; i < static_cast<size_t>(2 * d); ++i)
      local = std::max(local, std::abs(terms[i]));
    if (local == 0.0) continue;
    std::vector<std::vector<cplx>> Amat(d, std::vector<cplx>(d + 1));
    for (int row = 0; row < d; ++row) {
      size_t n = static_cast<size_t>(d + row);
      for (int col = 0; col < d; ++col)
        Amat[row][col] = terms[n - 1 - static_cast<size_t>(col)];
      Amat[row][d] = terms[n];
    }
    bool singular = false;
    for (int col = 0; col < d && !singular; ++col) {
      int piv = col;
      for (int r2 = col + 1; r2 < d; ++r2)
        if (std::abs(Amat[r2][col]) > std::abs(Amat[piv][col])) piv = r2;
      if (std::abs(Amat[piv][col]) < 1e-13 * local) { singular = true; break; }
      std::swap(Amat[col], Amat[piv]);
      for (int r2 = 0; r2 < d; ++r2) {
        if (r2 == col) continue;
        cplx factor = Amat[r2][col] / Amat[col][col];
        for (int c2 = col; c2 <= d; ++c2) Amat[r2][c2] -= factor * Amat[col][c2];
      }
    }
    if (singular) continue;
    std::vector<cplx> coef(d);
    for (int i = 0; i < d; ++i) coef[i] = Amat[i][d] / Amat[i][i];

    // The recurrence must hold across the whole supplied window.
    bool ok = true;
    for (size_t n = static_cast<size_t>(d); n < K && ok; ++n) {
      cplx pred{0.0, 0.0};
      for (int j = 0; j < d; ++j) pred += coef[j] * terms[n - 1 - static_cast<size_t>(j)];
      if (std::abs(terms[n] - pred) > 1e-12 * scale) ok = false;
    }
    if (!ok) continue;

    // All roots of z^d - c1 z^{d-1} - ... - cd must lie inside the unit
    // circle.  Power iteration on the companion matrix cannot be trusted
    // here: the tails that appear have several roots of equal modulus (a
    // real decay times a pair of conjugate phases), for which the iteration
    // never settles and its step growth pins at the shift rows.  Find the
    // actual roots with a Durand-Kerner sweep instead; degree <= 4 keeps it
    // tame.
    std::vector<cplx> roots(d);
    cplx seed{0.4, 0.9};
    cplx acc{1.0, 0.0};
    for (int i = 0; i < d; ++i) {
      acc *= seed;
      roots[i] = acc;
    }
    auto poly = [&](cplx z) {
      cplx val{1.0, 0.0};
      for (int j = 0; j < d; ++j) val = val * z - coef[j];
      return val;
    };
    for (int it = 0; it < 200; ++it) {
      double moved = 0.0;
      for (int i = 0; i < d; ++i) {
        cplx den{1.0, 0.0};
        for (int j = 0; j < d; ++j)
          if (j != i) den *= roots[i] - roots[j];
        if (std::abs(den) < 1e-300) den = cplx{1e-300, 0.0};
        cplx step = poly(roots[i]) / den;
        roots[i] -= step;
        moved = std::max(moved, std::abs(step));
      }
      if (moved < 1e-13) break;
    }
    double rho = 0.0;
    for (const cplx& r : roots) rho = std::max(rho, std::abs(r));
    if (rho >= 1.0 - 1e-9) continue;

    cplx csum{0.0, 0.0};
    for (int j = 0; j < d; ++j) csum += coef[j];
    if (std::abs(cplx{1.0, 0.0} - csum) < 1e-9) continue;

    // tail = sum_{n >= K} t_n with t_n = sum_j c_j t_{n-j}:
    // tail (1 - sum c_j) = sum_j c_j (t_{K-j} + ... + t_{K-1}).
    cplx rhs{0.0, 0.0};
    for (int j = 1; j <= d; ++j) {
      cplx part{0.0, 0.0};
      for (size_t i = K - static_cast<size_t>(j); i < K; ++i) part += terms[i];
      rhs += coef[static_cast<size_t>(j - 1)] * part;
    }
    TailLock out;
    out.tail = rhs / (cplx{1.0, 0.0} - csum);
    out.order = d;
    return out;
  }
  return std::nullopt;
}

}  // namespace tpl
