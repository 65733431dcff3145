#ifndef SO_CONVERSE_H
#define SO_CONVERSE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a fallible call.
 */
typedef enum SoStatus {
  SO_STATUS_OK = 0,
  SO_STATUS_NULL_POINTER = 1,
  SO_STATUS_INVALID_ARGUMENT = 2,
  SO_STATUS_CONFIG = 3,
  SO_STATUS_BUDGET = 4,
  SO_STATUS_NUMERICS = 5,
  SO_STATUS_DOMAIN = 6,
  SO_STATUS_IO = 7,
  /**
   * Any other library failure.
   */
  SO_STATUS_INTERNAL = 8,
  /**
   * A Rust panic was caught at the boundary.
   */
  SO_STATUS_PANIC = 9,
} SoStatus;

/**
 * Outcome of one check in a report.
 */
typedef enum SoCheckStatus {
  SO_CHECK_STATUS_PASS = 0,
  SO_CHECK_STATUS_FAIL = 1,
  SO_CHECK_STATUS_SKIP = 2,
} SoCheckStatus;

/**
 * Suite configuration.
 */
typedef struct SoConfig SoConfig;

/**
 * Generic representations of SO(2l, F_q) for the standard character.
 */
typedef struct SoDecomposition SoDecomposition;

/**
 * Result of a suite run.
 */
typedef struct SoReport SoReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread; do not free it.
 */
const char *so_last_error(void);

/**
 * Library version as a static string; do not free it.
 */
const char *so_version(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library that has not
 * been freed yet.
 */
void so_string_free(char *s);

/**
 * A configuration for rank `l` over F_q running every suite with the
 * default seed and tolerances. Validation happens when the suites run.
 */
struct SoConfig *so_config_new(size_t l, uint32_t q);

/**
 * # Safety
 * `cfg` must be null or a handle from [`so_config_new`] not freed yet.
 */
void so_config_free(struct SoConfig *cfg);

/**
 * # Safety
 * `cfg` must be a live handle from [`so_config_new`].
 */
enum SoStatus so_config_set_seed(struct SoConfig *cfg, uint64_t seed);

/**
 * Absolute tolerance of pointwise identities and relative tolerance of
 * gamma proportionality; both must be positive.
 *
 * # Safety
 * `cfg` must be a live handle from [`so_config_new`].
 */
enum SoStatus so_config_set_tolerances(struct SoConfig *cfg, double eq_abs, double gamma_rel);

/**
 * Allow the slow (3, 3) tier.
 *
 * # Safety
 * `cfg` must be a live handle from [`so_config_new`].
 */
enum SoStatus so_config_set_slow(struct SoConfig *cfg, bool slow);

/**
 * Directory for cached group enumerations; null clears it.
 *
 * # Safety
 * `cfg` must be a live handle from [`so_config_new`]; `dir` must be null
 * or a NUL-terminated UTF-8 string.
 */
enum SoStatus so_config_set_cache_dir(struct SoConfig *cfg, const char *dir);

/**
 * Restrict the run to a comma-separated list of suite names (groups,
 * weyl, decompose, bessel, zeta, gamma, multone, cells, converse) or
 * "all".
 *
 * # Safety
 * `cfg` must be a live handle from [`so_config_new`]; `names` must be a
 * NUL-terminated string.
 */
enum SoStatus so_config_set_suites(struct SoConfig *cfg, const char *names);

/**
 * Run the configured suites. On success `*out` receives a report to be
 * released with [`so_report_free`]; failed checks are part of a
 * successful run.
 *
 * # Safety
 * `cfg` must be a live handle from [`so_config_new`]; `out` must be a
 * valid pointer to writable storage.
 */
enum SoStatus so_run(const struct SoConfig *cfg, struct SoReport **out);

/**
 * # Safety
 * `report` must be null or a handle from [`so_run`] not freed yet.
 */
void so_report_free(struct SoReport *report);

/**
 * True when no check failed.
 *
 * # Safety
 * `report` must be a live handle from [`so_run`].
 */
bool so_report_passed(const struct SoReport *report);

/**
 * Number of checks, or 0 for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle from [`so_run`].
 */
size_t so_report_len(const struct SoReport *report);

/**
 * Name and status of check `index`. `*name` receives a string to free
 * with [`so_string_free`]; pass null to skip it.
 *
 * # Safety
 * `report` must be a live handle from [`so_run`]; `name` must be null or
 * valid for writing; `status` must be valid for writing.
 */
enum SoStatus so_report_check(const struct SoReport *report,
                              size_t index,
                              char **name,
                              enum SoCheckStatus *status);

/**
 * The report as JSON; free with [`so_string_free`]. Null on a null handle.
 *
 * # Safety
 * `report` must be null or a live handle from [`so_run`].
 */
char *so_report_json(const struct SoReport *report);

/**
 * Decompose the Gelfand-Graev representation of SO(2l, F_q). On success
 * `*out` receives a handle to be released with [`so_decomposition_free`].
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum SoStatus so_decompose(size_t l, uint32_t q, uint64_t seed, struct SoDecomposition **out);

/**
 * # Safety
 * `dec` must be null or a handle from [`so_decompose`] not freed yet.
 */
void so_decomposition_free(struct SoDecomposition *dec);

/**
 * Number of generic representations, or 0 for a null handle.
 *
 * # Safety
 * `dec` must be null or a live handle from [`so_decompose`].
 */
size_t so_decomposition_len(const struct SoDecomposition *dec);

/**
 * Facts about representation `index`: its dimension, whether it is
 * cuspidal, and the index of its conjugate by the outer automorphism.
 *
 * # Safety
 * `dec` must be a live handle from [`so_decompose`]; the out pointers
 * must be valid for writing.
 */
enum SoStatus so_decomposition_rep(const struct SoDecomposition *dec,
                                   size_t index,
                                   size_t *dim,
                                   bool *cuspidal,
                                   size_t *partner);

/**
 * Copy the Bessel function of representation `index` (its values on the
 * cell representatives) into `re` and `im`, each of capacity `cap`.
 * `*len` always receives the number of values; when `cap` is too small
 * nothing is copied and `SO_STATUS_INVALID_ARGUMENT` is returned.
 *
 * # Safety
 * `dec` must be a live handle from [`so_decompose`]; `len` must be valid
 * for writing; `re` and `im` must each be valid for `cap` writes.
 */
enum SoStatus so_decomposition_bessel(const struct SoDecomposition *dec,
                                      size_t index,
                                      double *re,
                                      double *im,
                                      size_t cap,
                                      size_t *len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SO_CONVERSE_H */
