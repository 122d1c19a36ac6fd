#ifndef NORDEN_H
#define NORDEN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NordenStatus {
  NORDEN_STATUS_OK = 0,
  NORDEN_STATUS_NULL_POINTER = 1,
  NORDEN_STATUS_INVALID_ARGUMENT = 2,
  NORDEN_STATUS_IO = 3,
  NORDEN_STATUS_PARSE = 4,
  NORDEN_STATUS_SHAPE = 5,
  NORDEN_STATUS_INVALID_MANIFOLD = 6,
  NORDEN_STATUS_NUMERIC = 7,
  NORDEN_STATUS_REFUSED = 8,
  NORDEN_STATUS_UTF8 = 9,
  NORDEN_STATUS_PANIC = 10,
} NordenStatus;

typedef enum NordenCheckStatus {
  NORDEN_CHECK_STATUS_PASS = 0,
  NORDEN_CHECK_STATUS_FAIL = 1,
  NORDEN_CHECK_STATUS_NOT_APPLICABLE = 2,
} NordenCheckStatus;

typedef struct NordenManifold NordenManifold;

typedef struct NordenReport NordenReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the next failing call.
 */
const char *norden_last_error_message(void);

/**
 * Static version string of the identity suite.
 */
const char *norden_suite_version(void);

/**
 * Loads a JSON manifest from `path`.
 */
enum NordenStatus norden_manifold_load(const char *path, struct NordenManifold **out);

/**
 * Parses a JSON manifest held in memory.
 */
enum NordenStatus norden_manifold_from_json(const char *json, struct NordenManifold **out);

/**
 * Builds a manifold from row-major arrays: `structure_constants[(k*dim + i)*dim + j]`
 * is the `e_k` component of `[e_i, e_j]`, `metric` and `j` are `dim*dim`.
 */
enum NordenStatus norden_manifold_from_arrays(const char *id,
                                              size_t dim,
                                              const double *structure_constants,
                                              const double *metric,
                                              const double *j,
                                              struct NordenManifold **out);

size_t norden_manifold_dim(const struct NordenManifold *m);

/**
 * Serializes the manifold as a manifest; release with [`norden_string_free`].
 */
enum NordenStatus norden_manifold_to_json(const struct NordenManifold *m, char **out);

void norden_manifold_free(struct NordenManifold *m);

/**
 * Runs the identity suite. `tolerance <= 0` selects the library default.
 * An invalid manifold yields `NORDEN_STATUS_INVALID_MANIFOLD` and no report.
 */
enum NordenStatus norden_verify(const struct NordenManifold *m,
                                double tolerance,
                                struct NordenReport **out);

/**
 * Class name (`KAHLER_W0`, `QUASI_KAHLER_W3` or `OTHER`); static storage.
 */
const char *norden_report_class(const struct NordenReport *r);

enum NordenStatus norden_report_counts(const struct NordenReport *r,
                                       size_t *pass,
                                       size_t *fail_count,
                                       size_t *not_applicable);

/**
 * Looks up one check by id. `residual` receives NaN when the check could not be formed.
 */
enum NordenStatus norden_report_check(const struct NordenReport *r,
                                      const char *check_id,
                                      enum NordenCheckStatus *status,
                                      double *residual);

/**
 * Structured (JSON) or text rendering of a report; release with [`norden_string_free`].
 */
enum NordenStatus norden_report_render(const struct NordenReport *r, bool json, char **out);

void norden_report_free(struct NordenReport *r);

void norden_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NORDEN_H */
