/* triplocal: local and global constants of triple-product L-values.
 *
 * C interface to the computation core.  All entry points exchange JSON
 * strings: the caller supplies a request object, the library returns a
 * freshly allocated response string (release it with tpl_string_free).
 * Status codes distinguish user errors from verification mismatches so a
 * caller can map them to process exit codes directly.
 *
 * Every function is thread-compatible: distinct contexts may be used from
 * distinct threads concurrently; a single context must not be shared.
 */

#ifndef TRIPLOCAL_H
#define TRIPLOCAL_H

#ifdef __cplusplus
extern "C" {
#endif

#define TPL_ABI_VERSION 1

typedef struct tpl_context tpl_context;

typedef enum {
  TPL_OK = 0,
  /* Malformed request: unknown fields, out-of-range parameters, a prime
   * that is not prime, a discriminant that is not fundamental, ... */
  TPL_STATUS_INVALID_ARGUMENT = 1,
  /* The computation ran, the response is populated, but an internal
   * cross-check failed: the bruteforce and closed routes disagree, or a
   * verification suite reported failing cases. */
  TPL_STATUS_MISMATCH = 2,
  /* Unexpected internal failure; details via tpl_last_error. */
  TPL_STATUS_INTERNAL = 3
} tpl_status;

/* Compile-time / run-time ABI agreement check. */
int tpl_abi_version(void);

tpl_context* tpl_context_new(void);
void tpl_context_free(tpl_context* ctx);

/* Message for the most recent failing call on this context ("" if none).
 * Owned by the context; valid until the next call on the same context. */
const char* tpl_last_error(const tpl_context* ctx);

/* Epsilon factor of a unit character.
 * Request : {"p": 3, "conductor": 1, "s": 0.5, "char": "quadratic",
 *            "seed": 7}
 *   "char" is "quadratic" (the first order-2 character of that conductor
 *   in the canonical enumeration) or "random" (drawn from "seed";
 *   conductor 0 means the trivial character).
 * Response: {"schema_version": 1, "re": ..., "im": ...}
 */
tpl_status tpl_epsilon_json(tpl_context* ctx, const char* request,
                            char** response);

/* Normalized local constant, bruteforce versus closed.
 * Request : {"p": 2, "m": 2, "kind": "sc", "c": 2, "unramified": false,
 *            "l1": 0, "l2": 0, "seed": 1, "deterministic": true,
 *            "extended": false}
 *   "kind" is "steinberg", "spherical", or "sc"; "c" and "unramified"
 *   apply to "sc" only.  The auxiliary characters are drawn from "seed".
 *   "deterministic" zeroes wall_time_ms so equal seeds give equal bytes.
 *   "extended" permits translates beyond the proven range (the routes are
 *   then reported without being compared).
 * Response: {"schema_version": 1, "p": ..., "m": ..., "kind": "...",
 *            "l1": ..., "l2": ...,
 *            "I_prime_bruteforce": {"re": ..., "im": ...},
 *            "I_prime_closed":     {"re": ..., "im": ...},
 *            "abs_err": ..., "wall_time_ms": ...}
 * Returns TPL_STATUS_MISMATCH (response still populated) when the routes
 * disagree beyond 1e-9 inside the proven translate range.
 */
tpl_status tpl_local_constant_json(tpl_context* ctx, const char* request,
                                   char** response);

/* Global normalization constant, exact rational.
 * Request : {"D": -8, "q1": 8, "unramified2": true}
 * Response: {"schema_version": 1, "D": ..., "q1": ..., "unramified2": ...,
 *            "value": "num/den"}
 */
tpl_status tpl_global_constant_json(tpl_context* ctx, const char* request,
                                    char** response);

/* Run the named verification suites.
 * Request : {"only": "", "jobs": 1, "seed": 1, "tolerance": 0.0,
 *            "deterministic": true}
 *   "only" restricts to one suite name ("" = all), "tolerance" overrides
 *   each suite's default when positive.
 * Response: {"schema_version": 1, "only": ..., "jobs": ..., "seed": ...,
 *            "tolerance": ..., "passed": ..., "failed": ...,
 *            "wall_time_ms": ..., "cases": [{"suite": ..., "name": ...,
 *            "pass": ..., "max_err": ..., "detail": ...}, ...]}
 * Returns TPL_STATUS_MISMATCH when any case fails.
 */
tpl_status tpl_verify_json(tpl_context* ctx, const char* request,
                           char** response);

/* Newline-separated list of verification suite names. */
tpl_status tpl_verify_suites(tpl_context* ctx, char** response);

void tpl_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* TRIPLOCAL_H */
