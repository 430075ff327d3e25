#ifndef QTRANSPORT_H
#define QTRANSPORT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QtStatus {
  QT_STATUS_OK = 0,
  QT_STATUS_NULL_POINTER = 1,
  QT_STATUS_INVALID_PARAMETER = 2,
  QT_STATUS_DOMAIN = 3,
  QT_STATUS_NON_FINITE = 4,
  QT_STATUS_NOT_EXTREMAL = 5,
  QT_STATUS_INFEASIBLE = 6,
  QT_STATUS_STRUCTURAL = 7,
  QT_STATUS_RESOLUTION = 8,
  QT_STATUS_GRID = 9,
  QT_STATUS_BUFFER_TOO_SMALL = 10,
  QT_STATUS_PANIC = 11,
} QtStatus;

/**
 * Opaque synthesized schedule. Free with [`qt_synthesis_free`].
 */
typedef struct QtSynthesis QtSynthesis;

/**
 * Phase-space point `(x1, x2, x3)`.
 */
typedef struct QtState {
  double x1;
  double x2;
  double x3;
} QtState;

typedef struct QtTransportReport {
  double fidelity;
  double phase_error;
  double heating;
  double measured_phase;
  double predicted_phase;
  double total_time;
  double distance;
} QtTransportReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *qt_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qt_version(void);

/**
 * Minimum-time schedule for `gamma` (negative values are mirrored).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum QtStatus qt_synthesize(double gamma, double eps_bang, struct QtSynthesis **out);

/**
 * # Safety
 * `handle` must come from [`qt_synthesize`] and not be used afterwards.
 * Null is ignored.
 */
void qt_synthesis_free(struct QtSynthesis *handle);

/**
 * # Safety
 * `handle` must be live; `out` must be writable.
 */
enum QtStatus qt_synthesis_rho(const struct QtSynthesis *handle, uint32_t *out);

/**
 * # Safety
 * `handle` must be live; `out` must be writable.
 */
enum QtStatus qt_synthesis_tau(const struct QtSynthesis *handle, double *out);

/**
 * # Safety
 * `handle` must be live; `out` must be writable.
 */
enum QtStatus qt_synthesis_total_time(const struct QtSynthesis *handle, double *out);

/**
 * Control of the first arc, `+1` or `-1`.
 *
 * # Safety
 * `handle` must be live; `out` must be writable.
 */
enum QtStatus qt_synthesis_initial_sign(const struct QtSynthesis *handle, int32_t *out);

/**
 * # Safety
 * `handle` must be live; `out` must be writable.
 */
enum QtStatus qt_synthesis_segment_count(const struct QtSynthesis *handle, size_t *out);

/**
 * Copies the arc durations into `buf`. `written` always receives the
 * number of durations; if `capacity` is smaller nothing is copied and
 * `BufferTooSmall` is returned.
 *
 * # Safety
 * `handle` must be live; `buf` must hold `capacity` doubles (may be null
 * when `capacity` is 0); `written` must be writable.
 */
enum QtStatus qt_synthesis_durations(const struct QtSynthesis *handle,
                                     double *buf,
                                     size_t capacity,
                                     size_t *written);

/**
 * JSON rendering of the synthesis. Release with [`qt_string_free`].
 *
 * # Safety
 * `handle` must be live; `out` must be writable.
 */
enum QtStatus qt_synthesis_to_json(const struct QtSynthesis *handle, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void qt_string_free(char *s);

/**
 * # Safety
 * `out` must be writable.
 */
enum QtStatus qt_minimum_time(double gamma, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum QtStatus qt_limit_curve(double gamma_bar, double *out);

/**
 * Closed-form endpoint of the schedule from the origin.
 *
 * # Safety
 * `durations` must hold `len` doubles; `out` must be writable.
 */
enum QtStatus qt_propagate(int32_t initial_sign,
                           const double *durations,
                           size_t len,
                           struct QtState *out);

/**
 * RK4 endpoint of the schedule with fixed `step`.
 *
 * # Safety
 * `durations` must hold `len` doubles; `out` must be writable.
 */
enum QtStatus qt_integrate_ode(int32_t initial_sign,
                               const double *durations,
                               size_t len,
                               double step,
                               struct QtState *out);

/**
 * Transports eigenstate `level` over `gamma` at trap speed `vmax` on the
 * default domain `[-10, d + 10]` with `n_points` samples and step `dt`.
 *
 * # Safety
 * `out` must be writable.
 */
enum QtStatus qt_transport_check(uint32_t level,
                                 double gamma,
                                 double vmax,
                                 size_t n_points,
                                 double dt,
                                 struct QtTransportReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QTRANSPORT_H */
