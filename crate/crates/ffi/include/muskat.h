#ifndef MUSKAT_H
#define MUSKAT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum MuskatStatus {
  MuskatStatus_Ok = 0,
  MuskatStatus_NullPointer = 1,
  MuskatStatus_InvalidArgument = 2,
  /**
   * The data left the small-amplitude regime (degenerate geometry, lost contraction, rejected step).
   */
  MuskatStatus_RegimeFailure = 3,
  MuskatStatus_NotConverged = 4,
  MuskatStatus_Panic = 5,
} MuskatStatus;

/**
 * Real field handle, stored as Fourier coefficients on its grid.
 */
typedef struct MuskatField MuskatField;

/**
 * Periodic grid handle.
 */
typedef struct MuskatGrid MuskatGrid;

/**
 * Fixed-point DN solver settings.
 */
typedef struct MuskatDnOptions {
  /**
   * Vertical intervals.
   */
  size_t levels;
  /**
   * Depth of the vertical domain; values ≤ 0 keep the default depth.
   */
  double z_max;
  double tol;
  size_t max_iter;
} MuskatDnOptions;

/**
 * Physical constants. `galerkin_r <= 0` selects the dealiasing radius.
 */
typedef struct MuskatParams {
  double kappa;
  double mu;
  double rho;
  double gravity;
  double surface_tension;
  double galerkin_r;
} MuskatParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error of this thread, NUL-terminated and truncated to `capacity`.
 * Returns the full message length in bytes (excluding the NUL).
 *
 * # Safety
 * `buffer` must be null or point to `capacity` writable bytes.
 */
size_t muskat_last_error(char *buffer, size_t capacity);

/**
 * Library version as a static NUL-terminated string.
 */
const char *muskat_version(void);

/**
 * Fills `out` with the default DN solver settings.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum MuskatStatus muskat_dn_options_default(struct MuskatDnOptions *out);

/**
 * Fills `out` with unit constants and the default cutoff.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum MuskatStatus muskat_params_default(struct MuskatParams *out);

/**
 * Creates a `dim`-dimensional grid with `n` points per side (power of two) and period `period`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum MuskatStatus muskat_grid_new(size_t dim, size_t n, double period, struct MuskatGrid **out);

/**
 * Number of samples `n^dim` of the grid, or 0 for a null handle.
 *
 * # Safety
 * `grid` must be null or a live grid handle.
 */
size_t muskat_grid_len(const struct MuskatGrid *grid);

/**
 * # Safety
 * `grid` must be null or a handle from `muskat_grid_new` not yet freed.
 */
void muskat_grid_free(struct MuskatGrid *grid);

/**
 * Builds a field from `len` row-major physical samples.
 *
 * # Safety
 * `grid` must be a live handle, `samples` must point to `len` doubles, `out` valid for writes.
 */
enum MuskatStatus muskat_field_from_samples(const struct MuskatGrid *grid,
                                            const double *samples,
                                            size_t len,
                                            struct MuskatField **out);

/**
 * Writes the physical samples of `field` into `buffer`, which must hold exactly the grid length.
 *
 * # Safety
 * `field` must be a live handle and `buffer` must point to `len` writable doubles.
 */
enum MuskatStatus muskat_field_to_samples(const struct MuskatField *field,
                                          double *buffer,
                                          size_t len);

/**
 * # Safety
 * `field` must be null or a handle produced by this library not yet freed.
 */
void muskat_field_free(struct MuskatField *field);

/**
 * Sobolev norm `‖f‖_{H^s}`; `s = 0` gives the L² norm.
 *
 * # Safety
 * `field` must be a live handle and `out` valid for writes.
 */
enum MuskatStatus muskat_field_sobolev_norm(const struct MuskatField *field, double s, double *out);

/**
 * Applies the DN operator: `out = G(f) g`. `opts` may be null for defaults;
 * `iterations` may be null.
 *
 * # Safety
 * `f` and `g` must be live handles on the same grid; `opts`, `iterations` null or valid.
 */
enum MuskatStatus muskat_dn_apply(const struct MuskatField *f,
                                  const struct MuskatField *g,
                                  const struct MuskatDnOptions *opts,
                                  struct MuskatField **out,
                                  size_t *iterations);

/**
 * Mean curvature `H(f)`.
 *
 * # Safety
 * `f` must be a live handle and `out` valid for writes.
 */
enum MuskatStatus muskat_mean_curvature(const struct MuskatField *f, struct MuskatField **out);

/**
 * Lyapunov functional `J(f) = ⟨H(f), G(f)f⟩`. `opts` may be null.
 *
 * # Safety
 * `f` must be a live handle, `opts` null or valid, `out` valid for writes.
 */
enum MuskatStatus muskat_lyapunov_j(const struct MuskatField *f,
                                    const struct MuskatDnOptions *opts,
                                    double *out);

/**
 * Evolves `f0` to `t_final` with the exponential integrator at step `dt`.
 * `params` and `opts` may be null for defaults; `steps` may be null.
 *
 * # Safety
 * `f0` must be a live handle; pointer arguments null or valid as documented.
 */
enum MuskatStatus muskat_evolve(const struct MuskatField *f0,
                                const struct MuskatParams *params,
                                const struct MuskatDnOptions *opts,
                                double dt,
                                double t_final,
                                struct MuskatField **out,
                                size_t *steps);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MUSKAT_H */
