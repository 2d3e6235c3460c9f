#ifndef TFINPAINT_H
#define TFINPAINT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Window shapes.
 */
typedef enum TfiWindow {
  TFI_WINDOW_HANN = 0,
} TfiWindow;

/*
 Result codes.
 */
typedef enum TfiStatus {
  TFI_STATUS_OK = 0,
  TFI_STATUS_NULL_POINTER = 1,
  TFI_STATUS_INVALID_PARAMETER = 2,
  TFI_STATUS_DIMENSION_MISMATCH = 3,
  TFI_STATUS_INCONSISTENT_MASK = 4,
  TFI_STATUS_NO_RELIABLE_DATA = 5,
  TFI_STATUS_NOT_POSITIVE_DEFINITE = 6,
  TFI_STATUS_DEGENERATE_SIGNAL = 7,
  TFI_STATUS_INSUFFICIENT_CONTEXT = 8,
  TFI_STATUS_CANNOT_PLACE_GAPS = 9,
  TFI_STATUS_UNDEFINED_REFERENCE = 10,
  TFI_STATUS_BUFFER_TOO_SMALL = 11,
  TFI_STATUS_INTERNAL = 12,
  TFI_STATUS_PANIC = 13,
} TfiStatus;

/*
 Opaque set of missing spectrogram columns.
 */
typedef struct TfiMask TfiMask;

/*
 Opaque complex spectrogram.
 */
typedef struct TfiSpectrogram TfiSpectrogram;

typedef struct TfiStftParams {
  uintptr_t win_len;
  uintptr_t hop;
  uintptr_t n_channels;
  enum TfiWindow window;
  uintptr_t frame_offset;
} TfiStftParams;

typedef struct TfiAdmmConfig {
  double rho;
  uintptr_t inner_iters;
  uintptr_t outer_iters;
  uintptr_t ar_order;
} TfiAdmmConfig;

typedef struct TfiBaselineConfig {
  uintptr_t ar_order;
  uintptr_t iters;
  /*
   Reliable samples per side; 0 selects the default `max(2 * ar_order, 4096)`.
   */
  uintptr_t context;
} TfiBaselineConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *tfi_version(void);

/*
 Message of the last failed call on this thread, or NULL. The pointer stays
 valid until the next library call on the same thread.
 */
const char *tfi_last_error_message(void);

/*
 Default STFT: 2048-sample Hann window, hop 512, 2048 channels.
 */
struct TfiStftParams tfi_stft_params_default(void);

struct TfiAdmmConfig tfi_admm_config_default(void);

struct TfiBaselineConfig tfi_baseline_config_default(void);

/*
 Number of STFT columns for a signal of `len` samples.

 # Safety
 `params` and `out_n_frames` must be valid pointers.
 */
enum TfiStatus tfi_n_frames(const struct TfiStftParams *params,
                            uintptr_t len,
                            uintptr_t *out_n_frames);

/*
 Analyzes `len` samples into a new spectrogram handle.

 # Safety
 `samples` must point to `len` doubles; `params` and `out` must be valid.
 */
enum TfiStatus tfi_stft(const double *samples,
                        uintptr_t len,
                        uint32_t sample_rate,
                        const struct TfiStftParams *params,
                        struct TfiSpectrogram **out);

/*
 # Safety
 `spec` must be NULL or a handle from this library not yet freed.
 */
void tfi_spectrogram_free(struct TfiSpectrogram *spec);

/*
 Shape of a spectrogram and the length of the signal it was computed from.

 # Safety
 `spec` must be a live handle; output pointers may be NULL.
 */
enum TfiStatus tfi_spectrogram_shape(const struct TfiSpectrogram *spec,
                                     uintptr_t *out_n_frames,
                                     uintptr_t *out_n_bins,
                                     uintptr_t *out_signal_len);

/*
 Copies the coefficients, column-major (frame-major), into separate real
 and imaginary buffers of `n_frames * n_bins` entries each.

 # Safety
 `spec` must be live; `re` and `im` must hold `len` doubles.
 */
enum TfiStatus tfi_spectrogram_coeffs(const struct TfiSpectrogram *spec,
                                      double *re,
                                      double *im,
                                      uintptr_t len);

/*
 Synthesizes a spectrogram into `out`, which must hold the signal length.

 # Safety
 `spec` must be live; `out` must hold `out_len` doubles.
 */
enum TfiStatus tfi_istft(const struct TfiSpectrogram *spec, double *out, uintptr_t out_len);

/*
 Mask with the given missing columns (duplicates allowed, any order).

 # Safety
 `columns` must hold `n_columns` entries; `out` must be valid.
 */
enum TfiStatus tfi_mask_new(uintptr_t n_frames,
                            const uintptr_t *columns,
                            uintptr_t n_columns,
                            struct TfiMask **out);

/*
 Random placement of `n_gaps` gaps of `gap_len` columns.

 # Safety
 `out` must be valid.
 */
enum TfiStatus tfi_mask_plan(uintptr_t n_frames,
                             uintptr_t gap_len,
                             uintptr_t n_gaps,
                             uint64_t seed,
                             uintptr_t margin,
                             uintptr_t separation,
                             struct TfiMask **out);

/*
 # Safety
 `mask` must be NULL or a handle from this library not yet freed.
 */
void tfi_mask_free(struct TfiMask *mask);

/*
 Writes the sorted missing columns to `out` and their count to
 `out_count`. With `out` NULL only the count is reported.

 # Safety
 `mask` must be live; `out` must hold `capacity` entries unless NULL.
 */
enum TfiStatus tfi_mask_missing_columns(const struct TfiMask *mask,
                                        uintptr_t *out,
                                        uintptr_t capacity,
                                        uintptr_t *out_count);

/*
 Copy of `spec` with the masked columns set to zero.

 # Safety
 `spec` and `mask` must be live; `out` must be valid.
 */
enum TfiStatus tfi_degrade(const struct TfiSpectrogram *spec,
                           const struct TfiMask *mask,
                           struct TfiSpectrogram **out);

/*
 Janssen-TF inpainting of `x_cor`. Writes the reconstructed signal to
 `out`; with `with_context` nonzero the observed columns are reinserted
 before synthesis.

 # Safety
 `x_cor`, `mask` and `cfg` must be valid; `out` must hold `out_len` doubles.
 */
enum TfiStatus tfi_janssen_tf(const struct TfiSpectrogram *x_cor,
                              const struct TfiMask *mask,
                              const struct TfiAdmmConfig *cfg,
                              bool with_context,
                              double *out,
                              uintptr_t out_len);

/*
 Marks, with 1 for reliable and 0 for missing, the samples untouched by the
 masked columns. `out` must hold `len` bytes.

 # Safety
 `mask` and `params` must be valid; `out` must hold `len` bytes.
 */
enum TfiStatus tfi_affected_samples(const struct TfiMask *mask,
                                    const struct TfiStftParams *params,
                                    uintptr_t len,
                                    uint8_t *out);

/*
 Gap-wise time-domain Janssen. `reliable[i]` nonzero marks a known sample.

 # Safety
 `samples`, `reliable` and `out` must hold `len` elements; `cfg` must be valid.
 */
enum TfiStatus tfi_gapwise_janssen(const double *samples,
                                   const uint8_t *reliable,
                                   uintptr_t len,
                                   uint32_t sample_rate,
                                   const struct TfiBaselineConfig *cfg,
                                   double *out);

/*
 SNR in dB of `estimate` against `reference`; +inf for an exact match.

 # Safety
 Both buffers must hold `len` doubles; `out_db` must be valid.
 */
enum TfiStatus tfi_snr(const double *reference,
                       const double *estimate,
                       uintptr_t len,
                       double *out_db);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TFINPAINT_H */
