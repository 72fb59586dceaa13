#ifndef JJVAR_H
#define JJVAR_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Each realization rescaled to RMS `sigma_nm` exactly.
 */
#define JJVAR_NORMALIZATION_REALIZATION 0

/**
 * Only the spectral filter normalized.
 */
#define JJVAR_NORMALIZATION_SPECTRAL 1

/**
 * Result code of every entry point.
 */
typedef enum JjvarStatus {
  JJVAR_STATUS_OK = 0,
  JJVAR_STATUS_NULL_POINTER = 1,
  JJVAR_STATUS_INVALID_ARGUMENT = 2,
  JJVAR_STATUS_COMPUTATION_ERROR = 3,
  JJVAR_STATUS_PANIC = 4,
} JjvarStatus;

/**
 * Opaque ensemble result.
 */
typedef struct JjvarEnsemble JjvarEnsemble;

/**
 * Opaque interface height field.
 */
typedef struct JjvarField JjvarField;

typedef struct JjvarJunction {
  double fermi_energy_ev;
  double barrier_height_ev;
  double nominal_thickness_nm;
  double gap_mev;
  double width_x_nm;
  double width_y_nm;
} JjvarJunction;

typedef struct JjvarTransmon {
  double e_c_ghz;
  double f01_mean_ghz;
  double f01_std_ghz;
} JjvarTransmon;

typedef struct JjvarLogNormalFit {
  double mu_j;
  double sigma_j;
  double mean_ghz;
  double std_ghz;
  uint64_t n;
  double ks_statistic;
  double sample_mean_ghz;
  double sample_std_ghz;
  double sample_skewness;
} JjvarLogNormalFit;

typedef struct JjvarRoughness {
  double sigma_nm;
  double xi_nm;
  /**
   * One of the `JJVAR_NORMALIZATION_*` constants.
   */
  uint32_t normalization;
} JjvarRoughness;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL after a
 * successful call. The pointer stays valid until the next call into the
 * library on the same thread.
 */
const char *jjvar_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *jjvar_version(void);

/**
 * Al/AlOx/Al device: E_F = 11.7 eV, U = 1.1 eV, d = 1 nm, gap 0.2 meV,
 * 200 x 200 nm.
 *
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum JjvarStatus jjvar_junction_paper_defaults(struct JjvarJunction *out);

/**
 * E_J / h (GHz) of a uniform barrier of thickness `d_nm`, Ambegaokar–Baratoff.
 *
 * # Safety
 * `junction` must be NULL or valid for reads, `out_ghz` NULL or valid for writes.
 */
enum JjvarStatus jjvar_ej_uniform(const struct JjvarJunction *junction,
                                  double d_nm,
                                  double *out_ghz);

/**
 * E_J / h (GHz) of a uniform barrier from the short-junction Andreev
 * bound-state supercurrent.
 *
 * # Safety
 * `junction` must be NULL or valid for reads, `out_ghz` NULL or valid for writes.
 */
enum JjvarStatus jjvar_ej_short_junction_uniform(const struct JjvarJunction *junction,
                                                 double d_nm,
                                                 double *out_ghz);

/**
 * First-order transmon frequency and spread from an E_J distribution (GHz).
 *
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum JjvarStatus jjvar_transmon_frequency(double mean_ej_ghz,
                                          double std_ej_ghz,
                                          double e_c_ghz,
                                          struct JjvarTransmon *out);

/**
 * Maximum-likelihood log-normal fit of `n` positive samples.
 *
 * # Safety
 * `samples` must point to `n` readable doubles; `out` NULL or valid for writes.
 */
enum JjvarStatus jjvar_fit_lognormal(const double *samples,
                                     size_t n,
                                     struct JjvarLogNormalFit *out);

/**
 * Runs a Monte Carlo ensemble on an `nx` x `ny` grid covering the junction.
 * `workers = 0` uses the available parallelism. Results do not depend on
 * the worker count.
 *
 * # Safety
 * Input pointers must be NULL or valid for reads; `out` NULL or valid for
 * writes. The handle written to `out` must be released with
 * [`jjvar_ensemble_free`].
 */
enum JjvarStatus jjvar_ensemble_run(const struct JjvarJunction *junction,
                                    const struct JjvarRoughness *roughness,
                                    size_t nx,
                                    size_t ny,
                                    size_t n_samples,
                                    uint64_t master_seed,
                                    size_t workers,
                                    struct JjvarEnsemble **out);

/**
 * Number of samples held by `ensemble`, or 0 for NULL.
 *
 * # Safety
 * `ensemble` must be NULL or a live handle.
 */
size_t jjvar_ensemble_len(const struct JjvarEnsemble *ensemble);

/**
 * Copies the E_J / h samples (GHz) in sample-index order. `capacity` must
 * be at least [`jjvar_ensemble_len`].
 *
 * # Safety
 * `ensemble` must be NULL or a live handle; `buffer` must hold `capacity`
 * writable doubles.
 */
enum JjvarStatus jjvar_ensemble_copy_ej(const struct JjvarEnsemble *ensemble,
                                        double *buffer,
                                        size_t capacity);

/**
 * Log-normal fit of the ensemble.
 *
 * # Safety
 * `ensemble` must be NULL or a live handle; `out` NULL or valid for writes.
 */
enum JjvarStatus jjvar_ensemble_fit(const struct JjvarEnsemble *ensemble,
                                    struct JjvarLogNormalFit *out);

/**
 * Releases an ensemble handle; NULL is ignored.
 *
 * # Safety
 * `ensemble` must be NULL or a handle not yet freed.
 */
void jjvar_ensemble_free(struct JjvarEnsemble *ensemble);

/**
 * Synthesizes one interface on an `nx` x `ny` grid over `lx_nm` x `ly_nm`.
 *
 * # Safety
 * `roughness` must be NULL or valid for reads; `out` NULL or valid for
 * writes. The handle must be released with [`jjvar_field_free`].
 */
enum JjvarStatus jjvar_field_synthesize(size_t nx,
                                        size_t ny,
                                        double lx_nm,
                                        double ly_nm,
                                        const struct JjvarRoughness *roughness,
                                        uint64_t seed,
                                        struct JjvarField **out);

/**
 * Grid dimensions of a field.
 *
 * # Safety
 * `field` must be NULL or a live handle; `nx`, `ny` NULL or valid for writes.
 */
enum JjvarStatus jjvar_field_dims(const struct JjvarField *field, size_t *nx, size_t *ny);

/**
 * Copies heights (nm) row-major, `values[iy * nx + ix]`.
 *
 * # Safety
 * `field` must be NULL or a live handle; `buffer` must hold `capacity`
 * writable doubles.
 */
enum JjvarStatus jjvar_field_copy_values(const struct JjvarField *field,
                                         double *buffer,
                                         size_t capacity);

/**
 * Releases a field handle; NULL is ignored.
 *
 * # Safety
 * `field` must be NULL or a handle not yet freed.
 */
void jjvar_field_free(struct JjvarField *field);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JJVAR_H */
