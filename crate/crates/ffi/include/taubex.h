#ifndef TAUBEX_H
#define TAUBEX_H

#include <stdbool.h>
#include <stddef.h>

typedef enum TaubexStatus {
  TAUBEX_STATUS_OK = 0,
  TAUBEX_STATUS_NULL_POINTER = 1,
  TAUBEX_STATUS_INVALID_ARGUMENT = 2,
  TAUBEX_STATUS_PARSE_ERROR = 3,
  /**
   * The window decays too slowly for the signal's growth.
   */
  TAUBEX_STATUS_DECAY_DEFICIT = 4,
  TAUBEX_STATUS_NUMERICAL_ERROR = 5,
  TAUBEX_STATUS_PANIC = 6,
} TaubexStatus;

typedef struct TaubexComparison TaubexComparison;

typedef struct TaubexReport TaubexReport;

typedef struct TaubexSignal TaubexSignal;

typedef struct TaubexTfMatrix TaubexTfMatrix;

typedef struct TaubexWindow TaubexWindow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failing call on this thread; empty after a
 * success. Valid until the next call into the library on this thread.
 */
const char *taubex_last_error(void);

/**
 * # Safety
 * `s` must come from a `taubex_*` function returning an owned string, or be null.
 */
void taubex_string_free(char *s);

/**
 * Builds a signal from a spec string such as `exp_step:beta=0.5` or a CSV path.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` writable.
 */
enum TaubexStatus taubex_signal_parse(const char *spec, struct TaubexSignal **out);

/**
 * Uniform samples `t0 + k step`, `k < len`, with real and imaginary parts.
 *
 * # Safety
 * `re` and `im` must point to `len` doubles; `im` may be null for a real signal.
 */
enum TaubexStatus taubex_signal_sampled(double t0,
                                        double step,
                                        size_t len,
                                        const double *re,
                                        const double *im,
                                        struct TaubexSignal **out);

/**
 * # Safety
 * `spec` must be a NUL-terminated string and `out` writable.
 */
enum TaubexStatus taubex_window_parse(const char *spec, struct TaubexWindow **out);

/**
 * Parses `beta=..,L=..`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` writable.
 */
enum TaubexStatus taubex_comparison_parse(const char *spec, struct TaubexComparison **out);

/**
 * Forward transform on `[x_lo, x_hi] x [xi_lo, xi_hi]` at imaginary offset `eta`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum TaubexStatus taubex_stft(const struct TaubexSignal *signal,
                              const struct TaubexWindow *window,
                              double x_lo,
                              double x_hi,
                              double x_step,
                              double xi_lo,
                              double xi_hi,
                              double xi_step,
                              double eta,
                              struct TaubexTfMatrix **out);

/**
 * # Safety
 * `m` must be live; `nx` and `nxi` writable.
 */
enum TaubexStatus taubex_tf_dims(const struct TaubexTfMatrix *m, size_t *nx, size_t *nxi);

/**
 * Copies the matrix row-major (`x` outer) into `re` and `im`, each of length `len`.
 *
 * # Safety
 * `re` and `im` must point to `len` writable doubles.
 */
enum TaubexStatus taubex_tf_values(const struct TaubexTfMatrix *m,
                                   double *re,
                                   double *im,
                                   size_t len);

/**
 * Weighted mixed `L^{p,q}` norm of a matrix; `weight` may be null for no weight.
 * Pass `INFINITY` for the max norm.
 *
 * # Safety
 * `m` must be live, `weight` null or NUL-terminated, `out` writable.
 */
enum TaubexStatus taubex_tf_norm(const struct TaubexTfMatrix *m,
                                 double p,
                                 double q,
                                 const char *weight,
                                 double *out);

/**
 * Potter bound check at `epsilon` over `|t|, |h| <= half_width` with the given step.
 *
 * # Safety
 * `c` must be live and `passed` writable.
 */
enum TaubexStatus taubex_potter_check(const struct TaubexComparison *c,
                                      double epsilon,
                                      double half_width,
                                      double step,
                                      bool *passed);

/**
 * Runs the full constant-recovery pipeline with default settings except the
 * tail grid `[x_lo, x_hi]`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum TaubexStatus taubex_tauber_run(const struct TaubexSignal *signal,
                                    const struct TaubexWindow *window,
                                    const struct TaubexComparison *c,
                                    double x_lo,
                                    double x_hi,
                                    double x_step,
                                    struct TaubexReport **out);

/**
 * Recovered constant and whether every hypothesis check and limit succeeded.
 *
 * # Safety
 * `r` must be live; outputs writable.
 */
enum TaubexStatus taubex_report_constant(const struct TaubexReport *r,
                                         double *re,
                                         double *im,
                                         bool *succeeded);

/**
 * Report as a JSON string; free with [`taubex_string_free`].
 *
 * # Safety
 * `r` must be live and `out` writable.
 */
enum TaubexStatus taubex_report_json(const struct TaubexReport *r, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TAUBEX_H */
