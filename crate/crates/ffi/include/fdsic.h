#ifndef FDSIC_H
#define FDSIC_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call. Zero means success.
 */
typedef enum FdsicStatus {
  FDSIC_STATUS_OK = 0,
  FDSIC_STATUS_NULL_POINTER = 1,
  FDSIC_STATUS_INVALID_ARGUMENT = 2,
  FDSIC_STATUS_INSUFFICIENT_DATA = 3,
  FDSIC_STATUS_SINGULAR = 4,
  FDSIC_STATUS_INFEASIBLE_RF_TARGET = 5,
  FDSIC_STATUS_ALIGNMENT = 6,
  FDSIC_STATUS_IO = 7,
  FDSIC_STATUS_PANIC = 8,
} FdsicStatus;

/**
 * Scalar system parameters settable through [`fdsic_params_set`].
 * Units follow the library: dBm for powers, dB for gains and ratios.
 */
typedef enum FdsicParam {
  FDSIC_PARAM_TX_POWER = 0,
  FDSIC_PARAM_SOI_POWER = 1,
  FDSIC_PARAM_PA_GAIN = 2,
  FDSIC_PARAM_PA_IIP3 = 3,
  FDSIC_PARAM_ANTENNA_ATTENUATION = 4,
  FDSIC_PARAM_RF_CANCELLATION = 5,
  FDSIC_PARAM_LNA_GAIN = 6,
  FDSIC_PARAM_IRR_TX = 7,
  FDSIC_PARAM_IRR_RX = 8,
  FDSIC_PARAM_ADC_BITS = 9,
  FDSIC_PARAM_PAPR = 10,
  FDSIC_PARAM_NOISE_FIGURE = 11,
} FdsicParam;

/**
 * Opaque fitted canceller.
 */
typedef struct FdsicEstimate FdsicEstimate;

/**
 * Opaque system parameter set.
 */
typedef struct FdsicParams FdsicParams;

/**
 * Power budget at one transmit power, all in dBm except the last two (dB).
 */
typedef struct FdsicBudget {
  double tx_dbm;
  double p_si;
  double p_si_im;
  double p_imd;
  double p_imd_im;
  double p_noise;
  double p_noise_im;
  double p_q;
  double p_soi;
  double p_si_before_ldc;
  double required_ldc;
  double sinr;
} FdsicBudget;

typedef struct FdsicComplex {
  double re;
  double im;
} FdsicComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *fdsic_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fdsic_version(void);

/**
 * Creates a parameter set holding the baseline values.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum FdsicStatus fdsic_params_new(struct FdsicParams **out);

/**
 * # Safety
 * `params` must come from [`fdsic_params_new`] and not be used afterwards.
 */
void fdsic_params_free(struct FdsicParams *params);

/**
 * Sets one parameter. Changing the noise figure moves the sensitivity
 * with it. The whole set is validated; on error it is left
 * unchanged.
 *
 * # Safety
 * `params` must be a live handle.
 */
enum FdsicStatus fdsic_params_set(struct FdsicParams *params, enum FdsicParam key, double value);

/**
 * Closed-form power budget at `tx_dbm`, with linear digital cancellation
 * chosen to push the linear SI 3 dB below the noise floor.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum FdsicStatus fdsic_budget(const struct FdsicParams *params,
                              double tx_dbm,
                              struct FdsicBudget *out);

/**
 * Least-squares fit of `y` from `x` with `taps` taps per branch, of which
 * `precursor` precede the current sample. With `widely_linear` false the
 * conjugate branch is fixed at zero.
 *
 * # Safety
 * `x` and `y` must each point to `len` elements; `out` must be writable.
 */
enum FdsicStatus fdsic_estimate(const struct FdsicComplex *x,
                                const struct FdsicComplex *y,
                                size_t len,
                                size_t taps,
                                size_t precursor,
                                bool widely_linear,
                                struct FdsicEstimate **out);

/**
 * # Safety
 * `est` must come from [`fdsic_estimate`] and not be used afterwards.
 */
void fdsic_estimate_free(struct FdsicEstimate *est);

/**
 * Number of taps per branch.
 *
 * # Safety
 * `est` must be a live handle or null (which yields 0).
 */
size_t fdsic_estimate_taps(const struct FdsicEstimate *est);

/**
 * Copies the direct and conjugate taps, `fdsic_estimate_taps` each.
 *
 * # Safety
 * `direct` and `conjugate` must each have room for that many elements.
 */
enum FdsicStatus fdsic_estimate_coefficients(const struct FdsicEstimate *est,
                                             struct FdsicComplex *direct,
                                             struct FdsicComplex *conjugate);

/**
 * Writes `y - h1 * x - h2 * conj(x)` to `out`.
 *
 * # Safety
 * `x`, `y` and `out` must each point to `len` elements.
 */
enum FdsicStatus fdsic_cancel(const struct FdsicEstimate *est,
                              const struct FdsicComplex *x,
                              const struct FdsicComplex *y,
                              size_t len,
                              struct FdsicComplex *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FDSIC_H */
