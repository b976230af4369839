// Local zeta values and half-integer powers of q.
//
// zeta_p(q, s) = 1/(1 - q^{-s}) is exactly rational for integer s; the
// half-integer powers keep the integer part exact and apply a single sqrt so
// that ratios of matching half-powers cancel cleanly.

#pragma once

#include <cmath>

#include "rational.hpp"

namespace tpl {

inline Rat64 zeta_p(std::int64_t q, int s) {
  return Rat64{1} / (Rat64{1} - rat_pow(q, -s));
}

// q^{e/2} as a double: exact rational power times at most one sqrt(q).
inline double q_half_pow(std::int64_t q, int e) {
  int j = e >= 0 ? e / 2 : -((-e + 1) / 2);  // floor(e/2)
  int r = e - 2 * j;                          // 0 or 1
  double out = rat_pow(q, j).to_double();
  if (r == 1) out *= std::sqrt(static_cast<double>(q));
  return out;
}

}  // namespace tpl
