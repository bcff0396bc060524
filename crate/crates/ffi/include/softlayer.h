#ifndef SOFTLAYER_H
#define SOFTLAYER_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_INVALID_ARGUMENT = 2,
  SL_STATUS_HYPOTHESIS = 3,
  SL_STATUS_NUMERICAL = 4,
  SL_STATUS_CERTIFICATE_NOT_FOUND = 5,
  SL_STATUS_PANIC = 6,
} SlStatus;

/**
 * Opaque meridian curve.
 */
typedef struct SlCurve SlCurve;

/**
 * Opaque transverse ground state.
 */
typedef struct SlGroundState SlGroundState;

typedef struct SlCurvatures {
  double k1;
  double k2;
  double gauss;
  double mean;
} SlCurvatures;

typedef struct SlCertificate {
  double n;
  double epsilon;
  double total;
  double norm_sq;
  double analytic_bound;
  /**
   * 1 when `total` certifies a bound state, else 0.
   */
  int32_t certified;
} SlCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *sl_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sl_version(void);

/**
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum SlStatus sl_curve_plane(struct SlCurve **out);

/**
 * Spherical cap of radius `radius` joined to a cone; `theta` as in the
 * library constructor.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum SlStatus sl_curve_cap_cone(double radius, double theta, struct SlCurve **out);

/**
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum SlStatus sl_curve_paraboloid(double c, struct SlCurve **out);

/**
 * # Safety
 * `curve` must be NULL or a handle from an `sl_curve_*` constructor that has
 * not been freed.
 */
void sl_curve_free(struct SlCurve *curve);

/**
 * # Safety
 * `curve` must be a live handle and `out` valid for a write.
 */
enum SlStatus sl_curvatures(const struct SlCurve *curve, double s, struct SlCurvatures *out);

/**
 * Total Gauss curvature on `[0, s_end]` by quadrature and by the boundary
 * term.
 *
 * # Safety
 * `curve` must be a live handle; the outputs valid for writes.
 */
enum SlStatus sl_total_curvature(const struct SlCurve *curve,
                                 double s_end,
                                 double *out_quadrature,
                                 double *out_boundary);

/**
 * Closed-form ground state of the δ-interaction of strength `alpha < 0`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum SlStatus sl_ground_state_delta(double alpha, struct SlGroundState **out);

/**
 * Ground state of the square well `-depth` on `[-a, a]`, solved on
 * `[-half_width, half_width]` with step `h`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum SlStatus sl_ground_state_square_well(double depth,
                                          double a,
                                          double half_width,
                                          double h,
                                          struct SlGroundState **out);

/**
 * # Safety
 * `gs` must be NULL or a live handle from an `sl_ground_state_*` constructor.
 */
void sl_ground_state_free(struct SlGroundState *gs);

/**
 * # Safety
 * `gs` must be a live handle and `out` valid for a write.
 */
enum SlStatus sl_ground_state_e1(const struct SlGroundState *gs, double *out);

/**
 * Normalized ground state `ξ₁(t)`.
 *
 * # Safety
 * `gs` must be a live handle and `out` valid for a write.
 */
enum SlStatus sl_ground_state_xi(const struct SlGroundState *gs, double t, double *out);

/**
 * Scans `schedule[0..len]` for a trial function with negative form. On
 * success `out` holds the witness; on `CERTIFICATE_NOT_FOUND` it holds the
 * last evaluated trial.
 *
 * # Safety
 * Handles must be live, `schedule` readable for `len` doubles, `out`
 * writable.
 */
enum SlStatus sl_certify(const struct SlCurve *curve,
                         const struct SlGroundState *gs,
                         const double *schedule,
                         size_t len,
                         struct SlCertificate *out);

/**
 * Lowest `k` eigenvalues of mode `m` on the uniform grid truncated at
 * `(s_end, t_half)`. Writes `k` values to `out_values` and the number below
 * `E₁` to `out_count`.
 *
 * # Safety
 * Handles must be live; `out_values` writable for `k` doubles and
 * `out_count` for one `size_t`.
 */
enum SlStatus sl_lowest_eigenvalues(const struct SlCurve *curve,
                                    const struct SlGroundState *gs,
                                    uint32_t m,
                                    double s_end,
                                    double t_half,
                                    double h_s,
                                    double h_t,
                                    size_t k,
                                    double *out_values,
                                    size_t *out_count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOFTLAYER_H */
