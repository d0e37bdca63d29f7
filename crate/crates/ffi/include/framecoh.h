#ifndef FRAMECOH_H
#define FRAMECOH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FcStatus {
  FC_STATUS_OK = 0,
  FC_STATUS_NULL_POINTER = 1,
  FC_STATUS_INVALID_ARGUMENT = 2,
  FC_STATUS_DIMENSION_MISMATCH = 3,
  FC_STATUS_PARSE = 4,
  FC_STATUS_IO = 5,
  FC_STATUS_GUARD_EXCEEDED = 6,
  FC_STATUS_UNDEFINED = 7,
  FC_STATUS_BUFFER_TOO_SMALL = 8,
  FC_STATUS_PANIC = 9,
} FcStatus;

/**
 * Opaque frame handle.
 */
typedef struct FcFrame FcFrame;

typedef struct FcCoherence {
  double mu;
  double nu;
  double spectral_norm;
  bool scp1;
  bool scp2;
} FcCoherence;

/**
 * Inputs to [`fc_ost_threshold`]; `t` must lie in (0, 1).
 */
typedef struct FcThresholdParams {
  double mu;
  size_t rows;
  double snr;
  double sigma2;
  size_t cols;
  double t;
} FcThresholdParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The
 * pointer stays valid until the next failing call on this thread.
 */
const char *fc_last_error(void);

/**
 * Builds a real frame from `rows * cols` column-major doubles. Columns
 * are normalized.
 *
 * # Safety
 * `data` must point to `rows * cols` doubles and `out` must be writable.
 */
enum FcStatus fc_frame_new_real(size_t rows, size_t cols, const double *data, struct FcFrame **out);

/**
 * Builds a complex frame from `rows * cols` interleaved `(re, im)` pairs.
 *
 * # Safety
 * `data` must point to `2 * rows * cols` doubles and `out` must be writable.
 */
enum FcStatus fc_frame_new_complex(size_t rows,
                                   size_t cols,
                                   const double *data,
                                   struct FcFrame **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` must be writable.
 */
enum FcStatus fc_frame_read(const char *path, struct FcFrame **out);

/**
 * # Safety
 * `frame` must be a live handle and `path` a NUL-terminated string.
 */
enum FcStatus fc_frame_write(const struct FcFrame *frame, const char *path, bool binary);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `frame` must be null or a handle not yet freed.
 */
void fc_frame_free(struct FcFrame *frame);

/**
 * Row count, or 0 for a null handle.
 *
 * # Safety
 * `frame` must be null or a live handle.
 */
size_t fc_frame_rows(const struct FcFrame *frame);

/**
 * Column count, or 0 for a null handle.
 *
 * # Safety
 * `frame` must be null or a live handle.
 */
size_t fc_frame_cols(const struct FcFrame *frame);

/**
 * # Safety
 * `frame` must be null or a live handle.
 */
bool fc_frame_is_complex(const struct FcFrame *frame);

/**
 * Copies the entries as interleaved `(re, im)` pairs, column-major.
 * `len` is the capacity of `out` in doubles and must be at least
 * `2 * rows * cols`.
 *
 * # Safety
 * `frame` must be a live handle and `out` must hold `len` doubles.
 */
enum FcStatus fc_frame_copy_data(const struct FcFrame *frame, double *out, size_t len);

/**
 * # Safety
 * `out` must be writable.
 */
enum FcStatus fc_build_gaussian(size_t rows, size_t cols, uint64_t seed, struct FcFrame **out);

/**
 * Random harmonic frame from an `n`-point DFT with `m` expected rows.
 * The realized row count is written to `selected_rows` when non-null.
 *
 * # Safety
 * `out` must be writable; `selected_rows` may be null.
 */
enum FcStatus fc_build_harmonic(size_t n,
                                size_t m,
                                uint64_t seed,
                                struct FcFrame **out,
                                size_t *selected_rows);

/**
 * Code-based frame over GF(2^m) with `t` Gold terms. `poly` of 0 selects
 * the built-in modulus.
 *
 * # Safety
 * `out` must be writable.
 */
enum FcStatus fc_build_code(uint32_t m, uint32_t t, uint32_t poly, struct FcFrame **out);

/**
 * # Safety
 * `frame` must be a live handle and `out` writable.
 */
enum FcStatus fc_frame_coherence(const struct FcFrame *frame, struct FcCoherence *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum FcStatus fc_welch_bound(size_t m, size_t n, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum FcStatus fc_complex_bound(size_t m, size_t n, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum FcStatus fc_real_bound(size_t m, size_t n, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum FcStatus fc_bound_3d(size_t n, double *out);

/**
 * Greedy flip. Writes the flipped frame to `out` and the `±1` pattern to
 * `signs`, which must hold at least `cols` entries.
 *
 * # Safety
 * `frame` must be a live handle, `out` writable and `signs` hold `len` bytes.
 */
enum FcStatus fc_linear_time_flip(const struct FcFrame *frame,
                                  struct FcFrame **out,
                                  int8_t *signs,
                                  size_t len);

/**
 * Exhaustive minimization of ν over sign patterns (at most 24 columns).
 *
 * # Safety
 * As for [`fc_linear_time_flip`]; `min_nu` may be null.
 */
enum FcStatus fc_exhaustive_flip(const struct FcFrame *frame,
                                 struct FcFrame **out,
                                 int8_t *signs,
                                 size_t len,
                                 double *min_nu);

/**
 * # Safety
 * `params` must be readable and `out` writable.
 */
enum FcStatus fc_ost_threshold(const struct FcThresholdParams *params, double *out);

/**
 * Recovers a sparse signal from `y` (`rows` interleaved complex values).
 * `estimate` receives `cols` interleaved complex values; `support`
 * receives the selected indices in ascending order and must hold `cols`
 * entries. The number selected goes to `support_len`.
 *
 * # Safety
 * `frame` must be a live handle, `y` must hold `2 * rows` doubles,
 * `estimate` `2 * cols` doubles and `support` `cols` entries.
 */
enum FcStatus fc_ost_recover(const struct FcFrame *frame,
                             const double *y,
                             double lambda,
                             double *estimate,
                             size_t *support,
                             size_t *support_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRAMECOH_H */
