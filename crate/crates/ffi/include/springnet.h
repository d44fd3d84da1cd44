#ifndef SPRINGNET_H
#define SPRINGNET_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Zero is success.
 */
typedef enum SnStatus {
  SN_STATUS_OK = 0,
  SN_STATUS_NULL_POINTER = 1,
  SN_STATUS_INVALID_ARGUMENT = 2,
  SN_STATUS_PRECONDITION = 3,
  SN_STATUS_NUMERICAL_GUARD = 4,
  SN_STATUS_NON_FINITE = 5,
  SN_STATUS_POSITIVITY = 6,
  SN_STATUS_ASSUMPTION = 7,
  SN_STATUS_DEGENERATE = 8,
  SN_STATUS_LEFT_PERTURBATIVE_REGIME = 9,
  SN_STATUS_NO_INSTABILITY = 10,
  SN_STATUS_IO = 11,
  SN_STATUS_PANIC = 12,
} SnStatus;

/**
 * Onset classification.
 */
typedef enum SnClassification {
  SN_CLASSIFICATION_SUPERCRITICAL = 0,
  SN_CLASSIFICATION_SUBCRITICAL = 1,
} SnClassification;

/**
 * Opaque macro solver.
 */
typedef struct SnMacroSolver SnMacroSolver;

/**
 * Opaque particle simulation.
 */
typedef struct SnMicroSim SnMicroSim;

/**
 * Summary of a bifurcation analysis. Absent values are NaN.
 */
typedef struct SnBifurcation {
  double beta_c;
  double beta;
  double lambda_10;
  double c;
  /**
   * Cross coefficient; NaN on a non-square rectangle.
   */
  double d;
  enum SnClassification classification;
  double stationary_amplitude;
  /**
   * 1 when every modelling assumption held.
   */
  uint8_t assumptions_ok;
} SnBifurcation;

/**
 * Particle model parameters on `[-l1, l1] x [-l2, l2]`.
 */
typedef struct SnMicroParams {
  size_t n;
  double kappa;
  double l0;
  double radius;
  double diffusion;
  double mu;
  double nu_f;
  double nu_d;
  double dt;
  double l1;
  double l2;
} SnMicroParams;

/**
 * Macro solver parameters. `n1`, `n2` are powers of two, at least 16.
 */
typedef struct SnMacroParams {
  double gamma;
  double kappa;
  double l0;
  double radius;
  double l1;
  double l2;
  size_t n1;
  size_t n2;
  double dt;
  /**
   * Non-zero enables 2/3-rule dealiasing.
   */
  uint8_t dealias;
} SnMacroParams;

/**
 * One cosine perturbation `eps cos(pi k1 x1 / L1 + pi k2 x2 / L2)` of the
 * uniform density.
 */
typedef struct SnCosineMode {
  int64_t k1;
  int64_t k2;
  double eps;
} SnCosineMode;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message on this thread into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes). Returns the full message length, so a
 * caller can size a buffer with a first call on `buf = NULL, len = 0`.
 *
 * # Safety
 * `buf` must be NULL or point to `len` writable bytes.
 */
size_t sn_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sn_version(void);

/**
 * Bessel function `J_order(x)`, `order` in 0..=2.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SnStatus sn_bessel_j(uint32_t order, double x, double *out_value);

/**
 * Struve function `H_order(x)`, `order` in 0..=1.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SnStatus sn_struve_h(uint32_t order, double x, double *out_value);

/**
 * Dispersion function `F(z) = z^2 + beta z^2 G(alpha, z)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SnStatus sn_dispersion(double alpha, double beta, double z, double *out_value);

/**
 * Shape function `G(alpha, z)` of the Hookean potential's transform.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SnStatus sn_hooke_shape(double alpha, double z, double *out_value);

/**
 * Critical coupling of mode (1,0) on `[-l1, l1] x [-l2, l2]`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SnStatus sn_beta_critical(double radius,
                               double alpha,
                               double l1,
                               double l2,
                               double *out_value);

/**
 * Analyses the onset at `beta`; pass NaN to use `beta_c`. Requires `l1 >= l2`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SnStatus sn_bifurcation_analyze(double radius,
                                     double alpha,
                                     double l1,
                                     double l2,
                                     double beta,
                                     struct SnBifurcation *out_report);

/**
 * Creates a simulation with uniformly drawn positions and no links.
 *
 * # Safety
 * `params` and `out_sim` must be valid pointers.
 */
enum SnStatus sn_micro_new(const struct SnMicroParams *params,
                           uint64_t seed,
                           struct SnMicroSim **out_sim);

/**
 * Releases a simulation. NULL is ignored.
 *
 * # Safety
 * `sim` must be NULL or come from `sn_micro_new`, and not be used afterwards.
 */
void sn_micro_free(struct SnMicroSim *sim);

/**
 * Advances `steps` time steps.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum SnStatus sn_micro_step(struct SnMicroSim *sim, uint64_t steps);

/**
 * Current time.
 *
 * # Safety
 * `sim` must be a live handle; returns NaN on NULL.
 */
double sn_micro_time(const struct SnMicroSim *sim);

/**
 * Number of live links.
 *
 * # Safety
 * `sim` must be a live handle; returns 0 on NULL.
 */
size_t sn_micro_link_count(const struct SnMicroSim *sim);

/**
 * Total spring energy of the live links.
 *
 * # Safety
 * `sim` must be a live handle; returns NaN on NULL.
 */
double sn_micro_energy(const struct SnMicroSim *sim);

/**
 * Copies positions as `x1, x2` pairs into `buf`, which holds `len` doubles
 * (at least `2 n`).
 *
 * # Safety
 * `sim` must be a live handle and `buf` point to `len` writable doubles.
 */
enum SnStatus sn_micro_positions(const struct SnMicroSim *sim, double *buf, size_t len);

/**
 * Creates a solver started from the uniform density plus `n_modes` cosines.
 *
 * # Safety
 * `params` and `out_solver` must be valid; `modes` must point to `n_modes`
 * entries or be NULL when `n_modes` is 0.
 */
enum SnStatus sn_macro_new(const struct SnMacroParams *params,
                           const struct SnCosineMode *modes,
                           size_t n_modes,
                           struct SnMacroSolver **out_solver);

/**
 * Releases a solver. NULL is ignored.
 *
 * # Safety
 * `solver` must be NULL or come from `sn_macro_new`, and not be used afterwards.
 */
void sn_macro_free(struct SnMacroSolver *solver);

/**
 * Advances `steps` time steps. Stops at the first failing step; the state
 * is left as it was before that step.
 *
 * # Safety
 * `solver` must be a live handle.
 */
enum SnStatus sn_macro_step(struct SnMacroSolver *solver, uint64_t steps);

/**
 * Current time.
 *
 * # Safety
 * `solver` must be a live handle; returns NaN on NULL.
 */
double sn_macro_time(const struct SnMacroSolver *solver);

/**
 * Total mass of the density.
 *
 * # Safety
 * `solver` must be a live handle; returns NaN on NULL.
 */
double sn_macro_mass(const struct SnMacroSolver *solver);

/**
 * Fourier coefficient of mode `(k1, k2)`.
 *
 * # Safety
 * `solver`, `re` and `im` must be valid pointers.
 */
enum SnStatus sn_macro_mode(const struct SnMacroSolver *solver,
                            int64_t k1,
                            int64_t k2,
                            double *re,
                            double *im);

/**
 * Free energy of the current density.
 *
 * # Safety
 * `solver` and `out_value` must be valid pointers.
 */
enum SnStatus sn_macro_free_energy(struct SnMacroSolver *solver, double *out_value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPRINGNET_H */
