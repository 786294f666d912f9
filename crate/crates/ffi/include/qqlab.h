#ifndef QQLAB_H
#define QQLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QqlabStatus {
  QQLAB_STATUS_OK = 0,
  QQLAB_STATUS_NULL_POINTER = 1,
  QQLAB_STATUS_INVALID_UTF8 = 2,
  /**
   * Bad config, parameters or structural set.
   */
  QQLAB_STATUS_INVALID_ARGUMENT = 3,
  /**
   * A numerical failure (pole hit, division by zero, ...).
   */
  QQLAB_STATUS_NUMERIC = 4,
  QQLAB_STATUS_IO = 5,
  QQLAB_STATUS_PANIC = 6,
} QqlabStatus;

/**
 * Opaque structural set.
 */
typedef struct QqlabFrame QqlabFrame;

/**
 * Opaque verification report.
 */
typedef struct QqlabReport QqlabReport;

/**
 * A quaternion `c[0] + c[1] e1 + c[2] e2 + c[3] e3`.
 */
typedef struct QqlabQuaternion {
  double c[4];
} QqlabQuaternion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *qqlab_last_error_message(void);

/**
 * # Safety
 * `out` must be null or valid for writes.
 */
enum QqlabStatus qqlab_quat_mul(struct QqlabQuaternion a,
                                struct QqlabQuaternion b,
                                struct QqlabQuaternion *out);

/**
 * # Safety
 * `out` must be null or valid for writes.
 */
enum QqlabStatus qqlab_quat_inverse(struct QqlabQuaternion a, struct QqlabQuaternion *out);

/**
 * `[n]_{q,q'}`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum QqlabStatus qqlab_qq_number(uint32_t n, double q, double qp, double *out);

/**
 * The standard frame `1, e1, e2, e3`. Never null.
 */
struct QqlabFrame *qqlab_frame_standard(void);

/**
 * A frame from 16 reals, `psi_0 .. psi_3` row by row.
 *
 * # Safety
 * `rows` must point to 16 readable doubles; `out` must be valid for writes.
 */
enum QqlabStatus qqlab_frame_new(const double *rows, struct QqlabFrame **out);

/**
 * # Safety
 * `frame` must be null or a handle from this library not yet freed.
 */
void qqlab_frame_free(struct QqlabFrame *frame);

/**
 * The Cauchy kernel at `tau` with pole `x`, and its four partials in
 * `tau` when `partials` is not null.
 *
 * # Safety
 * `tau` and `x` must point to 4 doubles, `out` must be valid for writes,
 * `partials` must be null or valid for 4 writes.
 */
enum QqlabStatus qqlab_kernel_eval(const struct QqlabFrame *frame,
                                   const double *tau,
                                   const double *x,
                                   struct QqlabQuaternion *out,
                                   struct QqlabQuaternion *partials);

/**
 * Runs the suite for a JSON config (null or `""` means defaults).
 * `threads = 0` uses the default pool; `no_timing` zeroes timings.
 *
 * # Safety
 * `config_json` must be null or a NUL-terminated string; `out` must be
 * valid for writes.
 */
enum QqlabStatus qqlab_run_suite(const char *config_json,
                                 uint32_t threads,
                                 bool no_timing,
                                 struct QqlabReport **out);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
size_t qqlab_report_row_count(const struct QqlabReport *report);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
size_t qqlab_report_fail_count(const struct QqlabReport *report);

/**
 * 0 when every row passed or was skipped, 1 otherwise; 2 for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
int32_t qqlab_report_exit_code(const struct QqlabReport *report);

/**
 * The report as CSV; free with [`qqlab_string_free`]. Null on failure.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
char *qqlab_report_csv(const struct QqlabReport *report);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void qqlab_report_free(struct QqlabReport *report);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void qqlab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QQLAB_H */
