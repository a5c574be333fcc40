#ifndef MMWAVE_D2D_H
#define MMWAVE_D2D_H

#pragma once

/* Generated with cbindgen:0.27.0 */

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Interference component for `mmw_laplace`.
typedef enum MmwLaplaceKind {
  MMW_LAPLACE_KIND_CC = 0,
  MMW_LAPLACE_KIND_DC_EXACT = 1,
  MMW_LAPLACE_KIND_DC_APPROX = 2,
  MMW_LAPLACE_KIND_CD = 3,
  MMW_LAPLACE_KIND_DD_INTRA = 4,
  MMW_LAPLACE_KIND_DD_INTER_EXACT = 5,
  MMW_LAPLACE_KIND_DD_INTER_APPROX = 6,
} MmwLaplaceKind;

// Serving link of the typical receiver.
typedef enum MmwMode {
  MMW_MODE_CELLULAR = 0,
  MMW_MODE_D2D = 1,
} MmwMode;

// Outcome of an FFI call.
typedef enum MmwStatus {
  MMW_STATUS_OK = 0,
  // A required pointer argument was null.
  MMW_STATUS_NULL_POINTER = 1,
  // An argument was out of range or a string was not valid UTF-8.
  MMW_STATUS_INVALID_ARGUMENT = 2,
  // The configuration could not be parsed or failed validation.
  MMW_STATUS_CONFIG = 3,
  // A numerical evaluation failed (e.g. quadrature did not converge).
  MMW_STATUS_NUMERICAL = 4,
  // The simulator rejected its settings.
  MMW_STATUS_SIMULATION = 5,
  // An internal panic was caught.
  MMW_STATUS_PANIC = 6,
} MmwStatus;

// Mode-selection formula.
typedef enum MmwVariant {
  MMW_VARIANT_PARTITIONED = 0,
  MMW_VARIANT_PRINTED = 1,
} MmwVariant;

// Opaque parameter set.
typedef struct MmwParams MmwParams;

// Monte Carlo estimate with its standard error.
typedef struct MmwEstimate {
  double mean;
  double std_err;
  uint64_t trials;
} MmwEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if there was
// none. Valid until the next failing call on the same thread.
const char *mmw_last_error(void);

// Library version as a static NUL-terminated string.
const char *mmw_version(void);

// Default (reference scenario) parameters. Never null.
struct MmwParams *mmw_params_default(void);

// Parse a TOML config; missing keys take default values.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum MmwStatus mmw_params_from_toml(const char *text, struct MmwParams **out);

// Independent copy of a parameter set.
//
// # Safety
// `params` must be a live handle and `out` a valid pointer.
enum MmwStatus mmw_params_clone(const struct MmwParams *params, struct MmwParams **out);

// Release a handle. Null is ignored.
//
// # Safety
// `params` must be null or a handle not yet freed.
void mmw_params_free(struct MmwParams *params);

// Set one config key in config units (dB, degrees, mW; booleans as 0/1).
// The handle is unchanged if the result would be invalid.
//
// # Safety
// `params` must be a live handle and `key` a NUL-terminated string.
enum MmwStatus mmw_params_set(struct MmwParams *params, const char *key, double value);

// Read one config key in config units.
//
// # Safety
// `params` must be a live handle, `key` a NUL-terminated string and
// `out` a valid pointer.
enum MmwStatus mmw_params_get(const struct MmwParams *params, const char *key, double *out);

// Probability that a potential D2D UE selects D2D mode.
//
// # Safety
// `params` must be a live handle and `out` a valid pointer.
enum MmwStatus mmw_p_d2d(const struct MmwParams *params, enum MmwVariant variant, double *out);

// Outage probability at linear SINR threshold `gamma`, averaged over the
// configured beamsteering error.
//
// # Safety
// `params` must be a live handle and `out` a valid pointer.
enum MmwStatus mmw_outage(const struct MmwParams *params,
                          enum MmwMode mode,
                          double gamma,
                          double p_d2d,
                          double *out);

// `E[exp(-v I)]` of one interference component. `w0` is the distance of
// the receiver from its cluster centre and is used by `DdIntra` only.
//
// # Safety
// `params` must be a live handle and `out` a valid pointer.
enum MmwStatus mmw_laplace(const struct MmwParams *params,
                           enum MmwLaplaceKind kind,
                           double v,
                           double p_d2d,
                           double w0,
                           double *out);

// Area spectral efficiency (bits/s/Hz/m²) at linear threshold `gamma`
// with the sharing mode and partition factor of `params`.
//
// # Safety
// `params` must be a live handle and `out` a valid pointer.
enum MmwStatus mmw_ase(const struct MmwParams *params, double gamma, double p_d2d, double *out);

// Simulated outage probability. Deterministic for a given seed.
//
// # Safety
// `params` must be a live handle and `out` a valid pointer.
enum MmwStatus mmw_simulate_outage(const struct MmwParams *params,
                                   enum MmwMode mode,
                                   double gamma,
                                   double p_d2d,
                                   uint64_t trials,
                                   uint64_t seed,
                                   struct MmwEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MMWAVE_D2D_H */
