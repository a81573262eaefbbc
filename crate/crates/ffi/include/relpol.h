#ifndef RELPOL_H
#define RELPOL_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum RelpolStatus {
  RELPOL_STATUS_OK = 0,
  RELPOL_STATUS_NULL_ARGUMENT = 1,
  RELPOL_STATUS_INVALID_UTF8 = 2,
  RELPOL_STATUS_DOMAIN = 3,
  RELPOL_STATUS_STATE = 4,
  RELPOL_STATUS_POLICY = 5,
  RELPOL_STATUS_TRAINING = 6,
  RELPOL_STATUS_PARAMS = 7,
  /**
   * The policy has no legal action in the state.
   */
  RELPOL_STATUS_DEAD_END = 8,
  RELPOL_STATUS_PANIC = 9,
} RelpolStatus;

/**
 * A parsed PSTRIPS domain.
 */
typedef struct RelpolDomain RelpolDomain;

/**
 * A decision list or ensemble, bound to its domain.
 */
typedef struct RelpolPolicy RelpolPolicy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. Valid until the next
 * call on the same thread; never null.
 */
const char *relpol_last_error(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void relpol_string_free(char *s);

/**
 * Loads a built-in domain by name (`bw1`, `lw2`, ...).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum RelpolStatus relpol_domain_builtin(const char *name, struct RelpolDomain **out);

/**
 * Parses a domain from its s-expression source.
 *
 * # Safety
 * `source` must be a NUL-terminated string; `out` must be writable.
 */
enum RelpolStatus relpol_domain_parse(const char *source, struct RelpolDomain **out);

/**
 * # Safety
 * `dom` must come from this library and not have been freed. Null is ignored.
 */
void relpol_domain_free(struct RelpolDomain *dom);

/**
 * Parses a `(policy ...)` or `(ensemble ...)` file for `dom`.
 *
 * # Safety
 * Pointers must be valid; `source` NUL-terminated.
 */
enum RelpolStatus relpol_policy_parse(const struct RelpolDomain *dom,
                                      const char *source,
                                      struct RelpolPolicy **out);

/**
 * Learns a policy from JSON-lines training data. `bag_size == 0` learns a
 * single decision list; otherwise `bag_size` members are learned from
 * `sample_size` trajectories each (untagged lines count as their own
 * trajectory).
 *
 * # Safety
 * Pointers must be valid; `training` NUL-terminated.
 */
enum RelpolStatus relpol_policy_learn(const struct RelpolDomain *dom,
                                      const char *training,
                                      size_t depth,
                                      size_t width,
                                      size_t beam,
                                      size_t bag_size,
                                      size_t sample_size,
                                      uint64_t seed,
                                      struct RelpolPolicy **out);

/**
 * # Safety
 * `pol` must come from this library and not have been freed. Null is ignored.
 */
void relpol_policy_free(struct RelpolPolicy *pol);

/**
 * Canonical text of a policy.
 *
 * # Safety
 * Pointers must be valid.
 */
enum RelpolStatus relpol_policy_to_string(const struct RelpolPolicy *pol, char **out);

/**
 * The action the policy takes in `state` (an `(state ...)` s-expression),
 * written as `name(object)`.
 *
 * # Safety
 * Pointers must be valid; `state` NUL-terminated.
 */
enum RelpolStatus relpol_act(const struct RelpolPolicy *pol, const char *state, char **out);

/**
 * Runs `episodes` test problems of `size` (`"20"`, `"<5,7,7,20"`, ...) and
 * reports the success rate and the mean length of successful episodes
 * (NaN when none succeed).
 *
 * # Safety
 * Pointers must be valid; `size` NUL-terminated.
 */
enum RelpolStatus relpol_evaluate(const struct RelpolPolicy *pol,
                                  const char *size,
                                  size_t episodes,
                                  size_t horizon,
                                  uint64_t seed,
                                  double *phi,
                                  double *psi);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RELPOL_H */
