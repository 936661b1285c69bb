#ifndef POLYSHOOT_H
#define POLYSHOOT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PsCriticality {
  PS_CRITICALITY_SUBCRITICAL = 0,
  PS_CRITICALITY_CRITICAL = 1,
  PS_CRITICALITY_SUPERCRITICAL = 2,
  PS_CRITICALITY_NOT_CLASSIFIABLE = 3,
} PsCriticality;

typedef enum PsOutcome {
  PS_OUTCOME_WALL_HIT = 0,
  PS_OUTCOME_DECAYED = 1,
  PS_OUTCOME_TRUNCATED = 2,
} PsOutcome;

typedef enum PsStatus {
  PS_STATUS_OK = 0,
  PS_STATUS_NULL_POINTER = 1,
  PS_STATUS_INVALID_INPUT = 2,
  PS_STATUS_NOT_FOUND = 3,
  PS_STATUS_INTEGRATION_FAILED = 4,
  PS_STATUS_BUFFER_TOO_SMALL = 5,
  PS_STATUS_PANIC = 6,
} PsStatus;

typedef enum PsTargetCase {
  PS_TARGET_CASE_BOUNDARY = 0,
  PS_TARGET_CASE_WALL_HIT = 1,
  PS_TARGET_CASE_DECAY = 2,
  PS_TARGET_CASE_UNRESOLVED = 3,
} PsTargetCase;

/**
 * A validated system with its reduced chain form.
 */
typedef struct PsSystem PsSystem;

/**
 * A recorded integration with its terminal classification.
 */
typedef struct PsTrajectory PsTrajectory;

/**
 * Integrator controls; see `ps_controls_default` for the defaults.
 */
typedef struct PsControls {
  double h0;
  double rel_tol;
  double abs_tol;
  double r_max;
  double eps_wall;
  double eps_decay;
  uint64_t max_steps;
  uint64_t dense_samples;
  double max_log_step;
} PsControls;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default integrator controls.
 */
struct PsControls ps_controls_default(void);

/**
 * Parses and validates a TOML system description. On success `*out` owns a
 * new handle, to be released with `ps_system_free`.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PsStatus ps_system_from_toml(const char *toml, struct PsSystem **out);

/**
 * Releases a system handle. Null is ignored.
 *
 * # Safety
 * `system` must come from `ps_system_from_toml` and not be used afterwards.
 */
void ps_system_free(struct PsSystem *system);

/**
 * Number of chain components, i.e. the length of every shooting vector.
 * Returns 0 for a null handle.
 *
 * # Safety
 * `system` must be null or a live handle.
 */
size_t ps_system_reduced_len(const struct PsSystem *system);

/**
 * Criticality class and Pohozaev bracket. Either output may be null.
 *
 * # Safety
 * `system` must be a live handle; outputs null or writable.
 */
enum PsStatus ps_classify(const struct PsSystem *system,
                          enum PsCriticality *class_out,
                          double *bracket_out);

/**
 * Integrates from `alpha` (all entries positive). `controls` may be null
 * for the defaults. On success `*out` owns a trajectory handle.
 *
 * # Safety
 * `alpha` must point to `len` doubles; `out` must be writable.
 */
enum PsStatus ps_shoot(const struct PsSystem *system,
                       const double *alpha,
                       size_t len,
                       const struct PsControls *controls,
                       struct PsTrajectory **out);

/**
 * Evaluates the target map at `alpha` (entries may be zero). Writes `len`
 * values to `psi_out` and the case to `case_out` (may be null).
 *
 * # Safety
 * `alpha` and `psi_out` must each hold `len` doubles.
 */
enum PsStatus ps_psi(const struct PsSystem *system,
                     const double *alpha,
                     size_t len,
                     const struct PsControls *controls,
                     double *psi_out,
                     enum PsTargetCase *case_out);

/**
 * Searches `Σα = mass` for a zero of the target map. Writes α★ (`len`
 * doubles, equal to the reduced length) and `‖ψ(α★)‖∞`. Returns
 * `NotFound` when the search ends without a zero.
 *
 * # Safety
 * `alpha_out` must hold `len` doubles; `psi_norm_out` may be null.
 */
enum PsStatus ps_find_zero(const struct PsSystem *system,
                           double mass,
                           const struct PsControls *controls,
                           uint32_t depth,
                           uint32_t budget,
                           double *alpha_out,
                           size_t len,
                           double *psi_norm_out);

/**
 * Releases a trajectory handle. Null is ignored.
 *
 * # Safety
 * `traj` must come from `ps_shoot` and not be used afterwards.
 */
void ps_trajectory_free(struct PsTrajectory *traj);

/**
 * Number of recorded radii (0 for null).
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t ps_trajectory_len(const struct PsTrajectory *traj);

/**
 * Number of components per sample (0 for null).
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t ps_trajectory_components(const struct PsTrajectory *traj);

/**
 * Copies the radii into `out` (capacity `cap`).
 *
 * # Safety
 * `out` must hold `cap` doubles.
 */
enum PsStatus ps_trajectory_radii(const struct PsTrajectory *traj, double *out, size_t cap);

/**
 * Copies component `m` (0-based) into `out`.
 *
 * # Safety
 * `out` must hold `cap` doubles.
 */
enum PsStatus ps_trajectory_values(const struct PsTrajectory *traj,
                                   size_t m,
                                   double *out,
                                   size_t cap);

/**
 * Copies the radial derivative of component `m` into `out`.
 *
 * # Safety
 * `out` must hold `cap` doubles.
 */
enum PsStatus ps_trajectory_derivatives(const struct PsTrajectory *traj,
                                        size_t m,
                                        double *out,
                                        size_t cap);

/**
 * Terminal classification: kind, terminal radius and, for a wall hit, the
 * component that reached zero. Outputs may be null.
 *
 * # Safety
 * `traj` must be a live handle.
 */
enum PsStatus ps_trajectory_outcome(const struct PsTrajectory *traj,
                                    enum PsOutcome *kind_out,
                                    double *radius_out,
                                    size_t *hit_index_out);

/**
 * Copies the last error message of this thread into `buf` as a
 * NUL-terminated string, truncated to `cap` bytes. Returns the full
 * message length excluding the terminator; pass `cap = 0` to query it.
 *
 * # Safety
 * `buf` must hold `cap` bytes (may be null when `cap` is 0).
 */
size_t ps_last_error_message(char *buf, size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYSHOOT_H */
