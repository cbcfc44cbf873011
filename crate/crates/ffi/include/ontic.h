/* C interface to the ontic simulation library. */

#pragma once

/* Generated by cbindgen from the ontic-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum OnticStatus {
  // The call succeeded and out parameters are valid.
  ONTIC_STATUS_OK = 0,
  // A required pointer argument was null.
  ONTIC_STATUS_NULL_ARGUMENT = 1,
  // An argument was outside its domain.
  ONTIC_STATUS_INVALID_ARGUMENT = 2,
  // A string argument was not valid UTF-8.
  ONTIC_STATUS_UTF8 = 3,
  // A JSON document failed to parse or serialize.
  ONTIC_STATUS_JSON = 4,
  // The library rejected the operation; see `ontic_last_error`.
  ONTIC_STATUS_DOMAIN = 5,
  // An internal invariant failed; the call did not complete.
  ONTIC_STATUS_PANIC = 6,
} OnticStatus;

// Opaque handle to an ordered projective measurement.
typedef struct OnticMeasurement OnticMeasurement;

// Opaque handle to a response model.
typedef struct OnticModel OnticModel;

// Opaque handle to a pure quantum state.
typedef struct OnticPureState OnticPureState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread.
//
// The pointer stays valid until the next failing call on the same thread;
// copy the contents before calling anything else. Never returns null.
const char *ontic_last_error(void);

// Releases a string returned by this library. Accepts null.
//
// # Safety
// `s` must be a pointer previously returned through a `char **` out
// parameter of this library, or null.
void ontic_string_free(char *s);

// Creates a model by name: "bell", "qubit-hemisphere", "general-cap", or
// "basis-cap". Cap models take their default layout (first computational
// axis anchor, computational preferred basis); see
// [`ontic_model_general_cap`] and [`ontic_model_basis_cap`] for custom
// layouts.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum OnticStatus ontic_model_new(const char *name, size_t d, struct OnticModel **out);

// Creates the single-cap model around a custom anchor state.
//
// # Safety
// `anchor` and `out` must be valid pointers.
enum OnticStatus ontic_model_general_cap(const struct OnticPureState *anchor,
                                         struct OnticModel **out);

// Creates the preferred-basis model from `len` orthonormal states.
//
// # Safety
// `basis` must point to `len` valid state pointers and `out` must be a
// valid pointer.
enum OnticStatus ontic_model_basis_cap(const struct OnticPureState *const *basis,
                                       size_t len,
                                       struct OnticModel **out);

// The model's canonical name as a static string; never free it. Returns
// null if `model` is null.
//
// # Safety
// `model` must be a valid model handle or null.
const char *ontic_model_name(const struct OnticModel *model);

// The model's Hilbert-space dimension.
//
// # Safety
// `model` and `out` must be valid pointers.
enum OnticStatus ontic_model_d(const struct OnticModel *model, size_t *out);

// Releases a model handle. Accepts null.
//
// # Safety
// `model` must be a handle from this library or null, not yet freed.
void ontic_model_free(struct OnticModel *model);

// Creates the computational basis state `|k>` in dimension `d`.
//
// # Safety
// `out` must be a valid pointer.
enum OnticStatus ontic_state_basis(size_t d, size_t k, struct OnticPureState **out);

// Draws a Haar-random state in dimension `d`, deterministically from
// `seed`.
//
// # Safety
// `out` must be a valid pointer.
enum OnticStatus ontic_state_random(size_t d, uint64_t seed, struct OnticPureState **out);

// Parses a state from its JSON form `{"d": ..., "re": [...], "im": [...]}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum OnticStatus ontic_state_from_json(const char *json, struct OnticPureState **out);

// Serializes a state to JSON; release the string with
// [`ontic_string_free`].
//
// # Safety
// `state` and `out_json` must be valid pointers.
enum OnticStatus ontic_state_to_json(const struct OnticPureState *state, char **out_json);

// The state's Hilbert-space dimension.
//
// # Safety
// `state` and `out` must be valid pointers.
enum OnticStatus ontic_state_d(const struct OnticPureState *state, size_t *out);

// Writes `|<a|b>|^2` to `out`.
//
// # Safety
// `a`, `b`, and `out` must be valid pointers.
enum OnticStatus ontic_state_fidelity(const struct OnticPureState *a,
                                      const struct OnticPureState *b,
                                      double *out);

// Releases a state handle. Accepts null.
//
// # Safety
// `state` must be a handle from this library or null, not yet freed.
void ontic_state_free(struct OnticPureState *state);

// Draws a random orthonormal measurement in the model's outcome order,
// deterministically from `seed`.
//
// # Safety
// `model` and `out` must be valid pointers.
enum OnticStatus ontic_measurement_random(const struct OnticModel *model,
                                          uint64_t seed,
                                          struct OnticMeasurement **out);

// Parses a measurement from JSON and re-orders its outcomes for this
// model's layout.
//
// # Safety
// `model` must be a valid model handle, `json` a NUL-terminated string,
// and `out` a valid pointer.
enum OnticStatus ontic_measurement_from_json(const struct OnticModel *model,
                                             const char *json,
                                             struct OnticMeasurement **out);

// Serializes a measurement to JSON; release the string with
// [`ontic_string_free`].
//
// # Safety
// `meas` and `out_json` must be valid pointers.
enum OnticStatus ontic_measurement_to_json(const struct OnticMeasurement *meas, char **out_json);

// Clones outcome `k` of the measurement into a fresh state handle.
//
// # Safety
// `meas` and `out` must be valid pointers.
enum OnticStatus ontic_measurement_outcome(const struct OnticMeasurement *meas,
                                           size_t k,
                                           struct OnticPureState **out);

// Releases a measurement handle. Accepts null.
//
// # Safety
// `meas` must be a handle from this library or null, not yet freed.
void ontic_measurement_free(struct OnticMeasurement *meas);

// Writes the Born probabilities of `psi` under `meas` into `out[0..len]`;
// `len` must equal the dimension.
//
// # Safety
// `psi` and `meas` must be valid handles and `out` must point to `len`
// writable doubles.
enum OnticStatus ontic_born_probabilities(const struct OnticPureState *psi,
                                          const struct OnticMeasurement *meas,
                                          double *out,
                                          size_t len);

// Writes the epistemic floor `z` for anchor fidelity `fidelity` in
// dimension `d`.
//
// # Safety
// `out` must be a valid pointer.
enum OnticStatus ontic_z_from_fidelity(double fidelity, size_t d, double *out);

// Runs one full trial (prepare, sample, respond) and writes the outcome
// index.
//
// # Safety
// `model`, `psi`, `meas`, and `out` must be valid pointers.
enum OnticStatus ontic_sample_outcome(const struct OnticModel *model,
                                      const struct OnticPureState *psi,
                                      const struct OnticMeasurement *meas,
                                      uint64_t seed,
                                      size_t *out);

// Samples `n` trials and writes the Born certification report
// (`trial-report/v1`) as JSON.
//
// # Safety
// `model`, `psi`, `meas`, and `out_json` must be valid pointers.
enum OnticStatus ontic_run_born_trials(const struct OnticModel *model,
                                       const struct OnticPureState *psi,
                                       const struct OnticMeasurement *meas,
                                       uint64_t n,
                                       uint64_t seed,
                                       char **out_json);

// Integrates the exact response masses and writes the `exact-born/v1`
// report as JSON.
//
// # Safety
// `model`, `psi`, `meas`, and `out_json` must be valid pointers.
enum OnticStatus ontic_exact_born_check(const struct OnticModel *model,
                                        const struct OnticPureState *psi,
                                        const struct OnticMeasurement *meas,
                                        char **out_json);

// Sweeps region samples against random measurements and writes the
// `property-report/v1` report as JSON. The model must have cap regions.
//
// # Safety
// `model` and `out_json` must be valid pointers.
enum OnticStatus ontic_check_region_constancy(const struct OnticModel *model,
                                              uint64_t n_states,
                                              uint64_t n_measurements,
                                              uint64_t seed,
                                              bool inject_failure,
                                              char **out_json);

// Writes the exact support overlap of the preparations of `a` and `b`.
//
// # Safety
// `model`, `a`, `b`, and `out` must be valid pointers.
enum OnticStatus ontic_exact_overlap(const struct OnticModel *model,
                                     const struct OnticPureState *a,
                                     const struct OnticPureState *b,
                                     double *out);

// Monte Carlo estimate of the support overlap of the preparations of `a`
// and `b`; writes the `overlap-report/v1` report as JSON.
//
// # Safety
// `model`, `a`, `b`, and `out_json` must be valid pointers.
enum OnticStatus ontic_estimate_overlap(const struct OnticModel *model,
                                        const struct OnticPureState *a,
                                        const struct OnticPureState *b,
                                        uint64_t n,
                                        uint64_t seed,
                                        char **out_json);

// Classifies the model over `len` prepared states and writes the
// `epistemicity-verdict/v1` report as JSON.
//
// # Safety
// `model` must be a valid model handle, `states` must point to `len`
// valid state pointers, and `out_json` must be a valid pointer.
enum OnticStatus ontic_classify_epistemicity(const struct OnticModel *model,
                                             const struct OnticPureState *const *states,
                                             size_t len,
                                             double threshold,
                                             char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
