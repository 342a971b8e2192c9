#ifndef HORNSOLVE_H
#define HORNSOLVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HsStatus {
  HS_STATUS_OK = 0,
  HS_STATUS_NULL_ARGUMENT = 1,
  HS_STATUS_INVALID_UTF8 = 2,
  HS_STATUS_PARSE = 3,
  HS_STATUS_INPUT = 4,
  HS_STATUS_RESOURCE_LIMIT = 5,
  HS_STATUS_INTERNAL = 6,
  HS_STATUS_PANIC = 7,
} HsStatus;

typedef enum HsFormat {
  HS_FORMAT_NATIVE = 0,
  HS_FORMAT_SMTLIB2 = 1,
} HsFormat;

typedef enum HsVerdictKind {
  HS_VERDICT_KIND_SAT = 0,
  HS_VERDICT_KIND_UNSAT = 1,
  HS_VERDICT_KIND_UNKNOWN = 2,
} HsVerdictKind;

typedef struct HsSystem HsSystem;

typedef struct HsVerdict HsVerdict;

/**
 * Resource limits and checking; start from [`hs_options_default`].
 */
typedef struct HsOptions {
  size_t max_derivations;
  size_t max_fm_constraints;
  /**
   * Milliseconds; 0 disables the limit.
   */
  uint64_t timeout_ms;
  bool check;
} HsOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *hs_last_error(void);

struct HsOptions hs_options_default(void);

/**
 * # Safety
 * `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HsStatus hs_system_parse(const char *source, enum HsFormat fmt, struct HsSystem **out);

/**
 * # Safety
 * `system` must come from [`hs_system_parse`] and not be freed already.
 */
void hs_system_free(struct HsSystem *system);

/**
 * 0 for a null handle.
 *
 * # Safety
 * `system` must be null or a live handle.
 */
size_t hs_system_predicate_count(const struct HsSystem *system);

/**
 * # Safety
 * `system` must be null or a live handle.
 */
size_t hs_system_clause_count(const struct HsSystem *system);

/**
 * # Safety
 * `system` must be a live handle and `out` a valid pointer.
 */
enum HsStatus hs_system_render(const struct HsSystem *system, enum HsFormat fmt, char **out);

/**
 * Solves `system`. `options` may be null for the defaults.
 *
 * # Safety
 * `system` must be a live handle, `options` null or valid, `out` valid.
 */
enum HsStatus hs_solve(const struct HsSystem *system,
                       const struct HsOptions *options,
                       struct HsVerdict **out);

/**
 * # Safety
 * `verdict` must be a live handle.
 */
enum HsVerdictKind hs_verdict_kind(const struct HsVerdict *verdict);

/**
 * The solution (sat), counterexample (unsat) or reason (unknown) as text.
 *
 * # Safety
 * `verdict` must be a live handle and `out` a valid pointer.
 */
enum HsStatus hs_verdict_render(const struct HsVerdict *verdict, enum HsFormat fmt, char **out);

/**
 * # Safety
 * `verdict` must come from [`hs_solve`] and not be freed already.
 */
void hs_verdict_free(struct HsVerdict *verdict);

/**
 * Checks a solution given as text. `*verified` is set on success.
 *
 * # Safety
 * `system` must be a live handle, `solution` NUL-terminated, `verified` valid.
 */
enum HsStatus hs_check(const struct HsSystem *system,
                       const char *solution,
                       enum HsFormat fmt,
                       bool *verified);

/**
 * # Safety
 * `s` must come from this library and not be freed already.
 */
void hs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HORNSOLVE_H */
