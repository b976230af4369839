#include "global.hpp"

#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace tpl {
namespace {

bool squarefree(std::int64_t n) {
  if (n < 0) n = -n;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % (d * d) == 0) return false;
  }
  return true;
}

std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
  std::vector<std::pair<std::int64_t, int>> out;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    int e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    out.emplace_back(d, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

}  // namespace

bool is_fundamental_discriminant(std::int64_t D) {
  if (D >= 0) return false;
  std::int64_t r4 = ((D % 4) + 4) % 4;
  if (r4 == 1) return squarefree(D);
  if (r4 == 0) {
    std::int64_t k = D / 4;
    std::int64_t k4 = ((k % 4) + 4) % 4;
    if (k4 != 2 && k4 != 3) return false;
    return squarefree(k);
  }
  return false;
}

Rat64 nu_factor(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("nu_factor: n must be positive");
  Rat64 out{n};
  for (const auto& [p, e] : factorize(n)) {
    (void)e;
    out = out * (Rat64{1} + Rat64{1, p});
  }
  return out;
}

Rat64 global_constant(std::int64_t D, std::int64_t q1, bool unramified2) {
  if (!is_fundamental_discriminant(D))
    throw std::invalid_argument("global_constant: D is not fundamental");
  const std::int64_t q = -D;
  if (q1 < 1 || q % q1 != 0)
    throw std::invalid_argument("global_constant: q1 must divide |D|");
  Rat64 out = nu_factor(q1) / (Rat64{8} * Rat64{q} * Rat64{q1} * nu_factor(q));
  if (q1 % 4 == 0 && !unramified2) out = out * Rat64{3, 2};
  return out;
}

Rat64 assemble_from_locals(std::int64_t D, std::int64_t q1, bool unramified2) {
  if (!is_fundamental_discriminant(D))
    throw std::invalid_argument("assemble_from_locals: D is not fundamental");
  const std::int64_t q = -D;
  if (q1 < 1 || q % q1 != 0)
    throw std::invalid_argument("assemble_from_locals: q1 must divide |D|");
  Rat64 out = Rat64{1} / (Rat64{8} * nu_factor(q));
  for (const auto& [p, m] : factorize(q)) {
    Rat64 pm = rat_pow(p, -m);
    std::int64_t e1 = 0;
    std::int64_t t = q1;
    while (t % p == 0) {
      t /= p;
      ++e1;
    }
    Rat64 local;
    if (e1 == 0) {
      local = pm;  // unramified principal series
    } else if (e1 == 1) {
      local = pm * (Rat64{1} + Rat64{1, p});  // twisted special
    } else {
      // Dyadic supercuspidal with its extra assembly weight.
      local = unramified2 ? pm * Rat64{3, 2}
                          : pm * (Rat64{1} + Rat64{1, p}) * Rat64{3, 2};
    }
    out = out * local;
  }
  return out;
}

}  // namespace tpl
