#ifndef BDG_LAB_H
#define BDG_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BdgStatus {
  BDG_STATUS_OK = 0,
  BDG_STATUS_NULL_POINTER = 1,
  BDG_STATUS_INVALID_ARGUMENT = 2,
  BDG_STATUS_INVALID_ORDER = 3,
  BDG_STATUS_NUMERICAL = 4,
  BDG_STATUS_CONFIG = 5,
  BDG_STATUS_PANIC = 6,
} BdgStatus;

/**
 * A simulated batch of `(si, qv)` path samples.
 */
typedef struct BdgBatch BdgBatch;

/**
 * Proved and sharp constants for one order.
 */
typedef struct BdgBounds BdgBounds;

/**
 * Plain copy of the values held by a [`BdgBounds`].
 */
typedef struct BdgConstants {
  uint32_t n;
  /**
   * 1 for odd orders, 0 for even.
   */
  uint8_t odd;
  double d1;
  double d2;
  double c1_proved;
  double c2_proved;
  double c1_sharp;
  double c2_sharp;
} BdgConstants;

typedef struct BdgMoments {
  uint32_t n;
  double m2n;
  double m2n_stderr;
  double qn;
  double qn_stderr;
  /**
   * `E|S|^{2n} / E[Q^n]`.
   */
  double z_pow_n;
} BdgMoments;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *bdg_last_error_message(void);

/**
 * Computes the constants for order `n` with enclosure width `tol`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one pointer.
 */
enum BdgStatus bdg_bounds_compute(uint32_t n, double tol, struct BdgBounds **out);

/**
 * # Safety
 * `bounds` must come from [`bdg_bounds_compute`]; `out` must be writable.
 */
enum BdgStatus bdg_bounds_get(const struct BdgBounds *bounds, struct BdgConstants *out);

/**
 * # Safety
 * `bounds` must be null or come from [`bdg_bounds_compute`], and must not
 * be used afterwards.
 */
void bdg_bounds_free(struct BdgBounds *bounds);

/**
 * Writes the coefficient `a_k` of `H_{2n}` as an exact `"p/q"` string.
 * Release it with [`bdg_string_free`].
 *
 * # Safety
 * `out` must be writable.
 */
enum BdgStatus bdg_hermite_coefficient(uint32_t n, uint32_t k, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void bdg_string_free(char *s);

/**
 * Simulates a batch described by a JSON configuration with fields `t`,
 * `steps`, `paths`, `seed`, `n`, `integrand` and `driver`. `threads = 0`
 * uses the default pool. Results do not depend on `threads`.
 *
 * # Safety
 * `config_json` must be a nul-terminated string; `out` must be writable.
 */
enum BdgStatus bdg_simulate_json(const char *config_json, size_t threads, struct BdgBatch **out);

/**
 * Number of paths in the batch, or 0 for a null handle.
 *
 * # Safety
 * `batch` must be null or come from [`bdg_simulate_json`].
 */
size_t bdg_batch_len(const struct BdgBatch *batch);

/**
 * Moment estimates of order `n`; `n = 0` uses the order from the config.
 *
 * # Safety
 * `batch` must come from [`bdg_simulate_json`]; `out` must be writable.
 */
enum BdgStatus bdg_batch_moments(const struct BdgBatch *batch, uint32_t n, struct BdgMoments *out);

/**
 * # Safety
 * `batch` must be null or come from [`bdg_simulate_json`], and must not be
 * used afterwards.
 */
void bdg_batch_free(struct BdgBatch *batch);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BDG_LAB_H */
