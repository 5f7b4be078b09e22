#ifndef SLABFLOW_H
#define SLABFLOW_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SfStatus {
  SF_STATUS_OK = 0,
  SF_STATUS_NULL_POINTER = 1,
  SF_STATUS_INVALID_ARGUMENT = 2,
  SF_STATUS_CONFIG = 3,
  SF_STATUS_NUMERICAL = 4,
  SF_STATUS_IO = 5,
  SF_STATUS_PANIC = 6,
} SfStatus;

/**
 * A primitive-solver run at one eps.
 */
typedef struct SfSimulation SfSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. Valid
 * until the next failing call on the same thread.
 */
const char *sf_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sf_version(void);

/**
 * New simulation from the built-in preset (`"default"` or `"ns"`) at `eps`.
 *
 * # Safety
 * `preset` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SfStatus sf_simulation_new_preset(const char *preset, double eps, struct SfSimulation **out);

/**
 * New simulation from TOML config text at `eps`.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SfStatus sf_simulation_new_from_toml(const char *toml, double eps, struct SfSimulation **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `sim` must come from a constructor of this library and not be used after.
 */
void sf_simulation_free(struct SfSimulation *sim);

/**
 * Takes `steps` steps at the stable time step.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum SfStatus sf_simulation_step(struct SfSimulation *sim, uint32_t steps);

/**
 * Advances to time `t` (no-op when already there).
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum SfStatus sf_simulation_advance_to(struct SfSimulation *sim, double t);

/**
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum SfStatus sf_simulation_time(const struct SfSimulation *sim, double *out);

/**
 * Total energy (kinetic plus potential relative to the static state).
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum SfStatus sf_simulation_energy(const struct SfSimulation *sim, double *out);

/**
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum SfStatus sf_simulation_mass(const struct SfSimulation *sim, double *out);

/**
 * Horizontal and vertical cell counts.
 *
 * # Safety
 * `sim` must be a live handle; `nh` and `nv` valid pointers.
 */
enum SfStatus sf_simulation_dims(const struct SfSimulation *sim, size_t *nh, size_t *nv);

/**
 * Copies field `component` (0 density, 1..=3 momentum) into `buf`, which
 * must hold exactly `nh * nh * nv` values in `(k, j, i)` order.
 *
 * # Safety
 * `sim` must be a live handle and `buf` valid for `len` writes.
 */
enum SfStatus sf_simulation_copy_field(const struct SfSimulation *sim,
                                       uint32_t component,
                                       double *buf,
                                       size_t len);

/**
 * Writes the current state as a snapshot file.
 *
 * # Safety
 * `sim` must be a live handle and `path` a NUL-terminated string.
 */
enum SfStatus sf_simulation_write_snapshot(const struct SfSimulation *sim, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SLABFLOW_H */
