#ifndef MPGTF_H
#define MPGTF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum MpgtfStatus {
  MPGTF_STATUS_OK = 0,
  MPGTF_STATUS_NULL_POINTER = 1,
  MPGTF_STATUS_INVALID_ARGUMENT = 2,
  MPGTF_STATUS_ODD_FILTER_COUNT = 3,
  MPGTF_STATUS_TOO_FEW_FILTERS = 4,
  MPGTF_STATUS_DIMENSION_MISMATCH = 5,
  MPGTF_STATUS_RANK_DEFICIENT = 6,
  MPGTF_STATUS_ZERO_POWER = 7,
  MPGTF_STATUS_IO = 8,
  MPGTF_STATUS_PARSE = 9,
  MPGTF_STATUS_INTERNAL = 10,
} MpgtfStatus;

/*
 Synthesis bank produced by [`mpgtf_decoder_pinv`].
 */
typedef struct MpgtfDecoder MpgtfDecoder;

/*
 Encoded signal, `n_filters x n_frames`.
 */
typedef struct MpgtfEncoded MpgtfEncoded;

/*
 Analysis filterbank.
 */
typedef struct MpgtfFilterbank MpgtfFilterbank;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. Valid until
 the next call into the library from the same thread.
 */
const char *mpgtf_last_error_message(void);

/*
 Library version, a static NUL-terminated string.
 */
const char *mpgtf_version(void);

/*
 Builds a bank of `n_filters` filters. `duration_s` is the filter length in
 seconds; frequencies are in Hz.

 # Safety
 `out` must be valid for a pointer write.
 */
enum MpgtfStatus mpgtf_filterbank_build(size_t n_filters,
                                        uint32_t sample_rate,
                                        double duration_s,
                                        double f_low_hz,
                                        double f_high_hz,
                                        struct MpgtfFilterbank **out);

/*
 Builds a bank with default parameters (8 kHz, 2 ms, 100 Hz to 4 kHz).

 # Safety
 `out` must be valid for a pointer write.
 */
enum MpgtfStatus mpgtf_filterbank_build_default(size_t n_filters, struct MpgtfFilterbank **out);

/*
 # Safety
 `bank` must be NULL or a handle from this library not yet freed.
 */
void mpgtf_filterbank_free(struct MpgtfFilterbank *bank);

/*
 Number of filters, 0 for NULL.

 # Safety
 `bank` must be NULL or a live handle.
 */
size_t mpgtf_filterbank_n_filters(const struct MpgtfFilterbank *bank);

/*
 Taps per filter, 0 for NULL.

 # Safety
 `bank` must be NULL or a live handle.
 */
size_t mpgtf_filterbank_filter_length(const struct MpgtfFilterbank *bank);

/*
 Sample rate in Hz, 0 for NULL.

 # Safety
 `bank` must be NULL or a live handle.
 */
uint32_t mpgtf_filterbank_sample_rate(const struct MpgtfFilterbank *bank);

/*
 Copies the coefficients, row-major, into `out` of exactly
 `n_filters * filter_length` values.

 # Safety
 `bank` must be a live handle and `out` valid for `len` writes.
 */
enum MpgtfStatus mpgtf_filterbank_coeffs(const struct MpgtfFilterbank *bank,
                                         double *out,
                                         size_t len);

/*
 Serializes the bank to JSON. Release the string with [`mpgtf_string_free`].

 # Safety
 `bank` must be a live handle and `out` valid for a pointer write.
 */
enum MpgtfStatus mpgtf_filterbank_to_json(const struct MpgtfFilterbank *bank, char **out);

/*
 Parses a bank from JSON written by [`mpgtf_filterbank_to_json`] or the CLI.

 # Safety
 `json` must be a NUL-terminated string and `out` valid for a pointer write.
 */
enum MpgtfStatus mpgtf_filterbank_from_json(const char *json, struct MpgtfFilterbank **out);

/*
 # Safety
 `s` must be NULL or a string returned by this library not yet freed.
 */
void mpgtf_string_free(char *s);

/*
 Pseudo-inverse decoder for an analysis bank.

 # Safety
 `bank` must be a live handle and `out` valid for a pointer write.
 */
enum MpgtfStatus mpgtf_decoder_pinv(const struct MpgtfFilterbank *bank, struct MpgtfDecoder **out);

/*
 # Safety
 `dec` must be NULL or a live handle.
 */
void mpgtf_decoder_free(struct MpgtfDecoder *dec);

/*
 Encodes `len` samples at the bank's sample rate. Only complete frames
 are kept.

 # Safety
 `samples` must be valid for `len` reads; handles must be live.
 */
enum MpgtfStatus mpgtf_encode(const struct MpgtfFilterbank *bank,
                              const double *samples,
                              size_t len,
                              size_t frame_shift,
                              struct MpgtfEncoded **out);

/*
 # Safety
 `enc` must be NULL or a live handle.
 */
void mpgtf_encoded_free(struct MpgtfEncoded *enc);

/*
 Rows of the encoding, 0 for NULL.

 # Safety
 `enc` must be NULL or a live handle.
 */
size_t mpgtf_encoded_n_filters(const struct MpgtfEncoded *enc);

/*
 Frames of the encoding, 0 for NULL.

 # Safety
 `enc` must be NULL or a live handle.
 */
size_t mpgtf_encoded_n_frames(const struct MpgtfEncoded *enc);

/*
 Copies the encoding, row-major, into `out` of exactly
 `n_filters * n_frames` values.

 # Safety
 `enc` must be a live handle and `out` valid for `len` writes.
 */
enum MpgtfStatus mpgtf_encoded_values(const struct MpgtfEncoded *enc, double *out, size_t len);

/*
 Half-wave rectified copy of an encoding.

 # Safety
 `enc` must be a live handle and `out` valid for a pointer write.
 */
enum MpgtfStatus mpgtf_rectify(const struct MpgtfEncoded *enc, struct MpgtfEncoded **out);

/*
 Multiplies an encoding by a non-negative mask given row-major with the
 encoding's shape.

 # Safety
 `mask` must be valid for `len` reads; handles must be live.
 */
enum MpgtfStatus mpgtf_apply_mask(const struct MpgtfEncoded *enc,
                                  const double *mask,
                                  size_t len,
                                  struct MpgtfEncoded **out);

/*
 Decodes with overlap-add into `out`, writing exactly `out_len` samples
 (truncated or zero-padded).

 # Safety
 `out` must be valid for `out_len` writes; handles must be live.
 */
enum MpgtfStatus mpgtf_decode(const struct MpgtfEncoded *enc,
                              const struct MpgtfDecoder *dec,
                              double *out,
                              size_t out_len);

/*
 Scale-invariant SNR in dB of `estimate` against `reference`, both of
 length `len`. A perfect estimate gives +infinity.

 # Safety
 Both arrays must be valid for `len` reads; `out_db` for one write.
 */
enum MpgtfStatus mpgtf_si_snr(const double *estimate,
                              const double *reference,
                              size_t len,
                              double *out_db);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MPGTF_H */
