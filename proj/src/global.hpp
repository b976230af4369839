// The global constant attached to an imaginary quadratic discriminant:
// an exact rational computed two ways, once from the closed multiplicative
// formula and once as a product of the closed local constants, so that the
// two routes can be compared bit for bit.

#pragma once

#include <cstdint>

#include "rational.hpp"

namespace tpl {

// Fundamental discriminant of an imaginary quadratic field: D < 0 with
// either D = 1 mod 4 squarefree, or D = 4k, k = 2 or 3 mod 4 squarefree.
bool is_fundamental_discriminant(std::int64_t D);

// nu(n) = n * prod_{p | n} (1 + 1/p).
Rat64 nu_factor(std::int64_t n);

// The closed form: nu(q1) / (8 q q1 nu(q)) with q = |D|, multiplied by 3/2
// when 4 | q1 and the dyadic representation is not the unramified-extension
// one.  Throws std::invalid_argument when D is not fundamental or q1 does
// not divide q.
Rat64 global_constant(std::int64_t D, std::int64_t q1, bool unramified2);

// The same constant as (1 / (8 nu(q))) times the product over p | q of the
// closed local constants with m = ord_p(q): the twisted-special value
// p^{-m}(1 + 1/p) when p divides q1 exactly once, the unramified value
// p^{-m} when p does not divide q1, and the dyadic supercuspidal value
// (with its extra 3/2 weight) when 4 | q1.  Must equal global_constant
// exactly.
Rat64 assemble_from_locals(std::int64_t D, std::int64_t q1, bool unramified2);

}  // namespace tpl
