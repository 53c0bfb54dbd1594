#ifndef JSR_H
#define JSR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status returned by every fallible call.
 */
typedef enum JsrStatus {
  JSR_STATUS_OK = 0,
  JSR_STATUS_INVALID_INPUT = 1,
  JSR_STATUS_NULL_POINTER = 2,
  JSR_STATUS_BUDGET = 3,
  JSR_STATUS_INCONCLUSIVE = 4,
  JSR_STATUS_PRECONDITION = 5,
  JSR_STATUS_NUMERICAL = 6,
  JSR_STATUS_PANIC = 7,
} JsrStatus;

/**
 * Opaque finite set of d×d complex matrices.
 */
typedef struct JsrMatrixSet JsrMatrixSet;

typedef struct JsrBracket {
  double lower;
  double upper;
  size_t depth_n;
  /**
   * Length of the word attaining `lower`.
   */
  size_t witness_len;
} JsrBracket;

typedef struct JsrCertificate {
  double theta;
  double lambda;
  double delta_c;
  double psi;
  double tau;
  double omega;
  size_t n0;
  uint32_t radius_exponent;
  double rho_lower;
  double rho_upper;
  /**
   * Certified radius at n0.
   */
  double radius_at_n0;
  /**
   * Lower guarantee on ρ of any set within `radius_at_n0`.
   */
  double guarantee_at_n0;
} JsrCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a set from `count` row-major d×d matrices stored back to back.
 * `im` may be null. On success `*out` owns a handle for `jsr_set_free`.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to `count·d·d` doubles; `out`
 * must be writable.
 */
enum JsrStatus jsr_set_new(size_t d,
                           size_t count,
                           const double *re,
                           const double *im,
                           struct JsrMatrixSet **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `set` must come from `jsr_set_new` and not be used afterwards.
 */
void jsr_set_free(struct JsrMatrixSet *set);

/**
 * Matrix dimension, or 0 for a null handle.
 *
 * # Safety
 * `set` must be null or a live handle.
 */
size_t jsr_set_dim(const struct JsrMatrixSet *set);

/**
 * Number of distinct members, or 0 for a null handle.
 *
 * # Safety
 * `set` must be null or a live handle.
 */
size_t jsr_set_len(const struct JsrMatrixSet *set);

/**
 * Lower and upper JSR bounds from products of length ≤ n. A zero
 * `budget` selects the default product budget.
 *
 * # Safety
 * `set` must be a live handle; `out` must be writable.
 */
enum JsrStatus jsr_bracket(const struct JsrMatrixSet *set,
                           size_t n,
                           uint64_t budget,
                           struct JsrBracket *out);

/**
 * Spectral radius of one row-major d×d matrix. `im` may be null.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to d·d doubles; `out` must be
 * writable.
 */
enum JsrStatus jsr_spectral_radius(size_t d, const double *re, const double *im, double *out);

/**
 * Builds a local Hölder certificate. With `empirical_lambda` non-zero the
 * rate constant is fitted from products up to `kmax` and `lambda` is
 * ignored; otherwise `lambda` is taken as given.
 *
 * # Safety
 * `set` must be a live handle; `out` must be writable.
 */
enum JsrStatus jsr_certificate(const struct JsrMatrixSet *set,
                               double lambda,
                               int32_t empirical_lambda,
                               uint32_t r,
                               size_t kmax,
                               size_t horizon,
                               uint64_t budget,
                               struct JsrCertificate *out);

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *jsr_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *jsr_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JSR_H */
