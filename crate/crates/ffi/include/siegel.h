#ifndef SIEGEL_H
#define SIEGEL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SiegelStatus {
  SIEGEL_STATUS_OK = 0,
  SIEGEL_STATUS_NULL_POINTER = 1,
  SIEGEL_STATUS_INVALID_INPUT = 2,
  SIEGEL_STATUS_DIMENSION_MISMATCH = 3,
  SIEGEL_STATUS_NOT_SYMMETRIC = 4,
  SIEGEL_STATUS_NOT_POSITIVE_DEFINITE = 5,
  SIEGEL_STATUS_NOT_SYMPLECTIC = 6,
  SIEGEL_STATUS_SINGULAR_DENOMINATOR = 7,
  SIEGEL_STATUS_NUMERICAL_FAILURE = 8,
  SIEGEL_STATUS_ITERATION_LIMIT = 9,
  SIEGEL_STATUS_OVERFLOW = 10,
  SIEGEL_STATUS_POLE_PROXIMITY = 11,
  SIEGEL_STATUS_EXPANSION_DOMAIN = 12,
  SIEGEL_STATUS_BRANCH_AMBIGUITY = 13,
  SIEGEL_STATUS_INVALID_PERMUTATION = 14,
  SIEGEL_STATUS_RANK_OUT_OF_RANGE = 15,
  SIEGEL_STATUS_CONFIG = 16,
  SIEGEL_STATUS_PANIC = 17,
} SiegelStatus;

/**
 * Opaque point of the Siegel upper half space.
 */
typedef struct SiegelPoint SiegelPoint;

typedef struct SiegelComplex {
  double re;
  double im;
} SiegelComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`) and returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t siegel_last_error(char *buf, size_t len);

/**
 * Builds a point from row-major `g x g` real and imaginary parts.
 *
 * # Safety
 * `re` and `im` must point to `g * g` doubles; `out` must be writable.
 */
enum SiegelStatus siegel_point_new(size_t g,
                                   const double *re,
                                   const double *im,
                                   struct SiegelPoint **out);

/**
 * Releases a point. Null is ignored.
 *
 * # Safety
 * `p` must be null or a handle from this library not yet freed.
 */
void siegel_point_free(struct SiegelPoint *p);

/**
 * Genus of the point, or 0 for null.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t siegel_point_genus(const struct SiegelPoint *p);

/**
 * Copies the row-major entries into `re` and `im`, each of length `len`
 * (at least `g * g`).
 *
 * # Safety
 * `p` must be a live handle; `re`, `im` must point to `len` writable doubles.
 */
enum SiegelStatus siegel_point_entries(const struct SiegelPoint *p,
                                       double *re,
                                       double *im,
                                       size_t len);

/**
 * Invariant distance.
 *
 * # Safety
 * `p`, `q` must be live handles; `out` must be writable.
 */
enum SiegelStatus siegel_distance(const struct SiegelPoint *p,
                                  const struct SiegelPoint *q,
                                  double *out);

/**
 * Upper bound on the distance between the classes of `p` and `q` under the
 * integral symplectic group, from a word search of length `radius`.
 *
 * # Safety
 * `p`, `q` must be live handles; `out` must be writable.
 */
enum SiegelStatus siegel_quotient_distance_upper(const struct SiegelPoint *p,
                                                 const struct SiegelPoint *q,
                                                 size_t radius,
                                                 double *out);

/**
 * `(AZ + B)(CZ + D)^{-1}` for the integral symplectic `gamma`, given as a
 * row-major `2g x 2g` array with `g` the genus of `z`.
 *
 * # Safety
 * `gamma` must point to `4 g^2` integers; `z` must be a live handle; `out`
 * must be writable.
 */
enum SiegelStatus siegel_mobius_act(const int64_t *gamma,
                                    const struct SiegelPoint *z,
                                    struct SiegelPoint **out);

/**
 * Reduces `z` into the Siegel set with parameters `a`, `n_bound`.
 * `gamma_out` (optional) receives the row-major `2g x 2g` integral matrix
 * with `out = gamma_out · z`; `iterations` (optional) the round count.
 *
 * # Safety
 * `z` must be a live handle; `out` must be writable; `gamma_out` must be
 * null or hold `4 g^2` integers; `iterations` must be null or writable.
 */
enum SiegelStatus siegel_reduce(const struct SiegelPoint *z,
                                double a,
                                double n_bound,
                                size_t max_iter,
                                struct SiegelPoint **out,
                                int64_t *gamma_out,
                                size_t *iterations);

/**
 * Period matrix of a plumbed family described by JSON (`"kind"` is
 * `"chain"` or `"nonseparating"`).
 *
 * # Safety
 * `json` must be a NUL-terminated UTF-8 string; `out` must be writable.
 */
enum SiegelStatus siegel_period_matrix_json(const char *json, struct SiegelPoint **out);

/**
 * Weierstrass `℘(z; Z + τZ)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SiegelStatus siegel_wp(struct SiegelComplex tau,
                            struct SiegelComplex z,
                            struct SiegelComplex *out);

/**
 * Quasi-periods `H1`, `H2` of the lattice `Z + τZ`.
 *
 * # Safety
 * `h1`, `h2` must be writable.
 */
enum SiegelStatus siegel_quasi_periods(struct SiegelComplex tau,
                                       struct SiegelComplex *h1,
                                       struct SiegelComplex *h2);

/**
 * A- and B-periods of the normalized kernel with its pole at `p`.
 *
 * # Safety
 * `a_period`, `b_period` must be writable.
 */
enum SiegelStatus siegel_kernel_periods(struct SiegelComplex tau,
                                        struct SiegelComplex p,
                                        struct SiegelComplex *a_period,
                                        struct SiegelComplex *b_period);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIEGEL_H */
