/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef JUMPFINDER_H
#define JUMPFINDER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum JfStatus {
  JF_STATUS_OK = 0,
  JF_STATUS_NULL_POINTER = 1,
  JF_STATUS_INVALID_INPUT = 2,
  JF_STATUS_EMPTY_WINDOW = 3,
  JF_STATUS_NO_VALID_GRID_POINT = 4,
  JF_STATUS_ALL_CANDIDATES_FAILED = 5,
  JF_STATUS_PANIC = 6,
} JfStatus;

/**
 * Detection procedure.
 */
typedef enum JfMethod {
  /**
   * Error-robust double-kernel detector.
   */
  JF_METHOD_NEW = 0,
  /**
   * Difference of conventional one-sided kernel estimates.
   */
  JF_METHOD_DKE = 1,
} JfMethod;

/**
 * Result of bootstrap bandwidth selection.
 */
typedef struct JfBootstrapResult JfBootstrapResult;

/**
 * Result of a single detection run.
 */
typedef struct JfJumpEstimate JfJumpEstimate;

/**
 * Observed `(w, y)` pairs.
 */
typedef struct JfSample JfSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies `n` pairs into a new sample. The sample is sorted by `w`.
 *
 * # Safety
 * `w` and `y` must point to `n` readable doubles; `out` must be writable.
 */
enum JfStatus jf_sample_new(const double *w, const double *y, size_t n, struct JfSample **out);

/**
 * # Safety
 * `sample` must be null or a handle from [`jf_sample_new`] not yet freed.
 */
void jf_sample_free(struct JfSample *sample);

/**
 * Number of observations, or 0 for a null handle.
 *
 * # Safety
 * `sample` must be null or a live handle.
 */
size_t jf_sample_len(const struct JfSample *sample);

/**
 * Runs the detector at one bandwidth on the default grid over `[min w, max w]`.
 *
 * # Safety
 * `sample` must be a live handle; `out` must be writable.
 */
enum JfStatus jf_detect(const struct JfSample *sample,
                        enum JfMethod method,
                        double bandwidth,
                        struct JfJumpEstimate **out);

/**
 * # Safety
 * `estimate` must be null or a live handle.
 */
void jf_estimate_free(struct JfJumpEstimate *estimate);

/**
 * Estimated jump location, or NaN for a null handle.
 *
 * # Safety
 * `estimate` must be null or a live handle.
 */
double jf_estimate_location(const struct JfJumpEstimate *estimate);

/**
 * Signed jump magnitude (right limit minus left limit), or NaN.
 *
 * # Safety
 * `estimate` must be null or a live handle.
 */
double jf_estimate_magnitude(const struct JfJumpEstimate *estimate);

/**
 * Bandwidth used, or NaN.
 *
 * # Safety
 * `estimate` must be null or a live handle.
 */
double jf_estimate_bandwidth(const struct JfJumpEstimate *estimate);

/**
 * Number of evaluated grid points in the difference curve.
 *
 * # Safety
 * `estimate` must be null or a live handle.
 */
size_t jf_estimate_curve_len(const struct JfJumpEstimate *estimate);

/**
 * Writes grid point `index` of the difference curve and its absolute difference.
 *
 * # Safety
 * `estimate` must be a live handle; `x` and `diff` must be writable.
 */
enum JfStatus jf_estimate_curve_point(const struct JfJumpEstimate *estimate,
                                      size_t index,
                                      double *x,
                                      double *diff);

/**
 * Bootstrap bandwidth selection with a percentile interval for the location.
 * With `n_candidates == 0` a default log-spaced candidate set is used.
 *
 * # Safety
 * `sample` must be a live handle; `candidates` must point to `n_candidates`
 * doubles; `out` must be writable.
 */
enum JfStatus jf_select_bandwidth(const struct JfSample *sample,
                                  enum JfMethod method,
                                  const double *candidates,
                                  size_t n_candidates,
                                  size_t replicates,
                                  uint64_t seed,
                                  double alpha,
                                  struct JfBootstrapResult **out);

/**
 * # Safety
 * `result` must be null or a live handle.
 */
void jf_bootstrap_free(struct JfBootstrapResult *result);

/**
 * # Safety
 * `result` must be null or a live handle.
 */
double jf_bootstrap_bandwidth(const struct JfBootstrapResult *result);

/**
 * Location estimated on the original sample at the selected bandwidth.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
double jf_bootstrap_location(const struct JfBootstrapResult *result);

/**
 * # Safety
 * `result` must be null or a live handle.
 */
double jf_bootstrap_magnitude(const struct JfBootstrapResult *result);

/**
 * Writes the percentile interval bounds.
 *
 * # Safety
 * `result` must be a live handle; `lower` and `upper` must be writable.
 */
enum JfStatus jf_bootstrap_ci(const struct JfBootstrapResult *result, double *lower, double *upper);

/**
 * Resamples that failed at the selected bandwidth.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
size_t jf_bootstrap_dropped(const struct JfBootstrapResult *result);

/**
 * Message for the most recent failure on this thread, or null if none.
 */
const char *jf_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *jf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JUMPFINDER_H */
