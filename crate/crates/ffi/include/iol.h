/* C ABI for the inverted-oscillator laboratory.
 *
 * Maintained alongside crates/ffi/src/lib.rs; regenerate with
 * `cbindgen --config cbindgen.toml --crate iol-ffi --output include/iol.h`.
 */

#ifndef IOL_H
#define IOL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 * Status codes returned by every entry point.
 */
typedef enum IolStatus {
  IOL_STATUS_OK = 0,
  IOL_STATUS_NULL_ARGUMENT = 1,
  IOL_STATUS_INVALID_DIMENSION = 2,
  IOL_STATUS_INVALID_PARAMS = 3,
  IOL_STATUS_OVERFLOW = 4,
  IOL_STATUS_CONDITIONING = 5,
  IOL_STATUS_TRUNCATION = 6,
  IOL_STATUS_RANGE_ERROR = 7,
  IOL_STATUS_BUFFER_TOO_SMALL = 8,
  IOL_STATUS_INTERNAL = 9,
} IolStatus;

/*
 * Opaque laboratory handle.
 */
typedef struct IolLab IolLab;

/*
 * Eta-weighted moments of a coherent family member (C layout).
 */
typedef struct IolExpectation {
  double time;
  double x_mean;
  double p_mean;
  double x2_mean;
  double p2_mean;
  double dx;
  double dp;
  double product;
  double eta_norm;
} IolExpectation;

#ifdef __cplusplus
extern "C" {
#endif  /* __cplusplus */

/*
 * Creates a laboratory handle. `quadrature_nodes` controls the contour
 * rules (use 200 for the validated defaults). On success writes the handle
 * through `out` and returns `Ok`.
 *
 * # Safety
 * `out` must be a valid pointer to writable handle storage.
 */
IolStatus iol_lab_new(double mass,
                      double omega,
                      double hbar,
                      size_t dim,
                      size_t quadrature_nodes,
                      IolLab **out);

/*
 * Frees a handle created by `iol_lab_new`. A null handle is a no-op.
 *
 * # Safety
 * `lab` must be null or a pointer previously returned by `iol_lab_new`
 * that has not been freed.
 */
void iol_lab_free(IolLab *lab);

/*
 * Eigenvalue residuals `|E_n - i*hbar*omega*(n+1/2)|` of the laboratory's
 * spectrum measurement for `n = 0..count`.
 *
 * # Safety
 * `lab` must be a live handle; `out_residuals` must point to at least
 * `count` writable doubles.
 */
IolStatus iol_spectrum_residuals(const IolLab *lab,
                                 size_t count,
                                 double *out_residuals);

/*
 * Largest deviation of the bi-orthonormality Gram matrix from the
 * identity, for indices up to `n_max`, by the chosen route
 * (`contour_route` nonzero selects the quadrature route).
 *
 * # Safety
 * `lab` must be a live handle; `out_deviation` must be writable.
 */
IolStatus iol_gram_max_deviation(const IolLab *lab,
                                 size_t n_max,
                                 int contour_route,
                                 double *out_deviation);

/*
 * Eta-weighted moments and uncertainties of the coherent family member
 * with modulus `alpha_mod` at time `t`.
 *
 * # Safety
 * `lab` must be a live handle; `out` must point to writable report
 * storage.
 */
IolStatus iol_coherent_expectations(const IolLab *lab,
                                    double alpha_mod,
                                    double t,
                                    IolExpectation *out);

/*
 * Deviation of the propagator-evolved coherent state from its
 * `alpha(t) = alpha*e^{omega t}` reconstruction (overlap deviation on the
 * clean block).
 *
 * # Safety
 * `lab` must be a live handle; `out_overlap_dev` and `out_eigen_residual`
 * must be writable.
 */
IolStatus iol_evolution_check(const IolLab *lab,
                              double alpha_mod,
                              double t,
                              double *out_overlap_dev,
                              double *out_eigen_residual);

/*
 * Classical trajectory on a uniform grid of `len` points spaced `dt`,
 * starting at `t = 0`. `use_rk4` nonzero integrates with RK4 instead of
 * the closed form.
 *
 * # Safety
 * `lab` must be a live handle; `out_x` and `out_p` must each point to at
 * least `len` writable doubles.
 */
IolStatus iol_classical_trajectory(const IolLab *lab,
                                   double x0,
                                   double p0,
                                   double dt,
                                   size_t len,
                                   int use_rk4,
                                   double *out_x,
                                   double *out_p);

/*
 * Fitted growth exponent of the naive norm integral of the n-th
 * generalized eigenfunction (approaches `2n+1`).
 *
 * # Safety
 * `lab` must be a live handle; `out_exponent` must be writable.
 */
IolStatus iol_divergence_exponent(const IolLab *lab,
                                  size_t n,
                                  double *out_exponent);

/*
 * Sup deviation of the partial bi-completeness kernel acting on the
 * width-deformed vacuum-shaped test function, over `|x| <= 2`.
 *
 * # Safety
 * `lab` must be a live handle; `out_deviation` must be writable.
 */
IolStatus iol_completeness_residual(const IolLab *lab,
                                    size_t n_terms,
                                    double width,
                                    double *out_deviation);

/*
 * Static, NUL-terminated version string.
 */
const char *iol_version(void);

/*
 * Static, NUL-terminated name for a status code.
 */
const char *iol_status_name(IolStatus status);

#ifdef __cplusplus
}  /* extern "C" */
#endif  /* __cplusplus */

#endif  /* IOL_H */
