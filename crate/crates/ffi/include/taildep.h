#ifndef TAILDEP_H
#define TAILDEP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

#define TD_OK 0

#define TD_ERR_NULL_POINTER -1

#define TD_ERR_INVALID_PARAMETER -2

#define TD_ERR_DOMAIN -3

#define TD_ERR_UNSUPPORTED_FAMILY -4

#define TD_ERR_QUADRATURE -5

#define TD_ERR_INVALID_SAMPLE -6

#define TD_ERR_UNKNOWN_MEASURE -7

#define TD_ERR_INVALID_TDF -8

#define TD_ERR_INVALID_UTF8 -9

#define TD_ERR_PANIC -10

/**
 * A bivariate copula.
 */
typedef struct TdCopula TdCopula;

/**
 * Pseudo-observations of a bivariate sample.
 */
typedef struct TdSample TdSample;

/**
 * A tail dependence function.
 */
typedef struct TdTdf TdTdf;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; empty when none. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *td_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *td_version(void);

/**
 * Parses a family expression (the CLI grammar, e.g. `smo:0.353,0.75`).
 *
 * # Safety
 * `expr` must be a NUL-terminated string and `out` a valid pointer.
 */
int32_t td_copula_parse(const char *expr, struct TdCopula **out);

/**
 * # Safety
 * `c` must come from `td_copula_parse` and not be used afterwards; null is ignored.
 */
void td_copula_free(struct TdCopula *c);

/**
 * C(u, v).
 *
 * # Safety
 * `c` must be a live handle and `out` a valid pointer.
 */
int32_t td_copula_cdf(const struct TdCopula *c, double u, double v, double *out);

/**
 * Draws `n` pairs into the caller-owned arrays `u_out` and `v_out`.
 *
 * # Safety
 * `u_out` and `v_out` must each have room for `n` doubles.
 */
int32_t td_copula_sample(const struct TdCopula *c,
                         uintptr_t n,
                         uint64_t seed,
                         double *u_out,
                         double *v_out);

/**
 * Lower tail dependence function of a copula.
 *
 * # Safety
 * `c` must be a live handle and `out` a valid pointer.
 */
int32_t td_copula_lower_tdf(const struct TdCopula *c, struct TdTdf **out);

/**
 * # Safety
 * `t` must come from this library and not be used afterwards; null is ignored.
 */
void td_tdf_free(struct TdTdf *t);

/**
 * Λ(u, v) for u, v ≥ 0.
 *
 * # Safety
 * `t` must be a live handle and `out` a valid pointer.
 */
int32_t td_tdf_eval(const struct TdTdf *t, double u, double v, double *out);

/**
 * Closed-route value of a named measure (`tdc`, `spearman`, `chi_star`, …).
 * `t_min` floors the λ̄ grid and `l` sets the b-grid; pass 0 for defaults.
 *
 * # Safety
 * `t` must be a live handle, `measure` NUL-terminated, `out` valid.
 */
int32_t td_tdf_measure(const struct TdTdf *t,
                       const char *measure,
                       double t_min,
                       uintptr_t l,
                       double *out);

/**
 * Pseudo-observations from `n` raw pairs (ranked), or from uniform values
 * of known margins when `pseudo` is nonzero.
 *
 * # Safety
 * `x` and `y` must point to `n` doubles each.
 */
int32_t td_sample_new(const double *x,
                      const double *y,
                      uintptr_t n,
                      int32_t pseudo,
                      struct TdSample **out);

/**
 * # Safety
 * `s` must come from `td_sample_new` and not be used afterwards; null is ignored.
 */
void td_sample_free(struct TdSample *s);

/**
 * Number of observations.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
int32_t td_sample_len(const struct TdSample *s, uintptr_t *out);

/**
 * Plateau choice of k in [k_min, k_max]; zeros select the default bounds.
 * `fallback` receives 1 when no plateau qualified.
 *
 * # Safety
 * `s` must be a live handle; `k_out` valid; `fallback` may be null.
 */
int32_t td_sample_plateau(const struct TdSample *s,
                          uintptr_t k_min,
                          uintptr_t k_max,
                          uintptr_t *k_out,
                          int32_t *fallback);

/**
 * Plug-in estimate of a named measure at threshold k with default grids.
 *
 * # Safety
 * `s` must be a live handle, `measure` NUL-terminated, `out` valid.
 */
int32_t td_sample_estimate(const struct TdSample *s, uintptr_t k, const char *measure, double *out);

/**
 * Point estimate and percentile bootstrap interval (B replicates, fixed k).
 *
 * # Safety
 * `s` must be a live handle, `measure` NUL-terminated, outputs valid.
 */
int32_t td_sample_bootstrap(const struct TdSample *s,
                            uintptr_t k,
                            const char *measure,
                            uintptr_t replicates,
                            double level,
                            uint64_t seed,
                            double *estimate,
                            double *ci_low,
                            double *ci_high);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TAILDEP_H */
