#ifndef LONGWAVE_H
#define LONGWAVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum LwStatus {
  LW_STATUS_OK = 0,
  LW_STATUS_NULL_POINTER = 1,
  LW_STATUS_INVALID_ARGUMENT = 2,
  LW_STATUS_INPUT_TOO_SHORT = 3,
  LW_STATUS_NON_FINITE_INPUT = 4,
  LW_STATUS_BUFFER_TOO_SMALL = 5,
  // Optimizer, factorization or other numerical failure.
  LW_STATUS_NUMERICAL = 6,
  LW_STATUS_PANIC = 7,
} LwStatus;

// Filter family selector for [`lw_bank_new`].
typedef enum LwVariant {
  LW_VARIANT_CFW_C = 0,
  LW_VARIANT_CFW_PR = 1,
  LW_VARIANT_DAUBECHIES = 2,
} LwVariant;

// Which `p × p` matrix [`lw_fit_matrix`] copies.
typedef enum LwMatrix {
  LW_MATRIX_OMEGA = 0,
  LW_MATRIX_PHI = 1,
  LW_MATRIX_RHO = 2,
} LwMatrix;

// Opaque filter bank.
typedef struct LwBank LwBank;

// Opaque estimation result.
typedef struct LwFit LwFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Pointer to the NUL-terminated message of the last failure on this
// thread, or null. Valid until the next failing call on the same thread.
const char *lw_last_error(void);

// Library version as a static NUL-terminated string.
const char *lw_version(void);

// Builds a filter bank with `m` vanishing moments and analyticity order `l`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum LwStatus lw_bank_new(enum LwVariant variant, size_t m, size_t l, struct LwBank **out);

// Releases a bank. Null is ignored.
//
// # Safety
// `bank` must come from [`lw_bank_new`] and not have been freed.
void lw_bank_free(struct LwBank *bank);

// Tap count of each of the four filters.
//
// # Safety
// `bank` must be a live handle and `out` valid for one write.
enum LwStatus lw_bank_support_length(const struct LwBank *bank, size_t *out);

// `ψ̂(λ) = ψ̂_h(λ) + i ψ̂_g(λ)`.
//
// # Safety
// `bank` must be a live handle; `re` and `im` valid for one write each.
enum LwStatus lw_bank_psi_hat(const struct LwBank *bank, double lambda, double *re, double *im);

// Scale normalization constant `K(δ)`.
//
// # Safety
// `bank` must be a live handle and `out` valid for one write.
enum LwStatus lw_bank_k(const struct LwBank *bank, double delta, double *out);

// Fits the `n × p` row-major sample `data` on scales `j0..=j1`; `j1 = 0`
// selects the deepest usable scale.
//
// # Safety
// `bank` must be a live handle, `data` valid for `n·p` reads and `out`
// valid for one write.
enum LwStatus lw_estimate(const struct LwBank *bank,
                          const double *data,
                          size_t n,
                          size_t p,
                          size_t j0,
                          size_t j1,
                          struct LwFit **out);

// Releases a fit. Null is ignored.
//
// # Safety
// `fit` must come from [`lw_estimate`] and not have been freed.
void lw_fit_free(struct LwFit *fit);

// Number of channels of a fit, or 0 for null.
//
// # Safety
// `fit` must be null or a live handle.
size_t lw_fit_dim(const struct LwFit *fit);

// Copies `d̂` into `out` (at least `p` values).
//
// # Safety
// `fit` must be a live handle and `out` valid for `len` writes.
enum LwStatus lw_fit_d(const struct LwFit *fit, double *out, size_t len);

// Copies `Ω̂`, `φ̂` or `ρ̂` row-major into `out` (at least `p²` values).
//
// # Safety
// `fit` must be a live handle and `out` valid for `len` writes.
enum LwStatus lw_fit_matrix(const struct LwFit *fit, enum LwMatrix which, double *out, size_t len);

// Simulates ARFIMA(0, d, 0) with innovation covariance `sigma` (`p × p`,
// row-major) into `out` (`n × p`, row-major).
//
// # Safety
// `d` must be valid for `p` reads, `sigma` for `p²` reads and `out` for
// `len` writes.
enum LwStatus lw_simulate_arfima(size_t n,
                                 size_t p,
                                 const double *d,
                                 const double *sigma,
                                 uint64_t seed,
                                 double *out,
                                 size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LONGWAVE_H */
