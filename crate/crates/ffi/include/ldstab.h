/* C interface to the ldstab set-stability analysis. */

#ifndef LDSTAB_H
#define LDSTAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status of every fallible call.
typedef enum LdstabStatus {
  // Success.
  LDSTAB_STATUS_OK = 0,
  // A required pointer argument was null.
  LDSTAB_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  LDSTAB_STATUS_INVALID_UTF8 = 2,
  // The document was not a valid network.
  LDSTAB_STATUS_PARSE_ERROR = 3,
  // An index, distribution, or step count was out of range.
  LDSTAB_STATUS_INVALID_ARGUMENT = 4,
  // A brute-force operation exceeded its resource cap.
  LDSTAB_STATUS_CAP_EXCEEDED = 5,
  // No target set: the document has none and none was passed.
  LDSTAB_STATUS_NO_TARGET = 6,
  // An internal consistency check failed; report this as a bug.
  LDSTAB_STATUS_INTERNAL = 7,
} LdstabStatus;

// Opaque handle to a parsed network document.
typedef struct ldstab_system ldstab_system;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread, or null if
// none has occurred. The pointer stays valid until the next failing call
// on the same thread; do not free it.
const char *ldstab_last_error(void);

// Parse a JSON network document into a fresh handle.
//
// # Safety
// `json` must point to a NUL-terminated string and `out` to writable
// storage for one pointer.
enum LdstabStatus ldstab_system_parse(const char *json, struct ldstab_system **out);

// Release a handle from `ldstab_system_parse`. Passing null is a no-op.
//
// # Safety
// `sys` must be null or a pointer this library returned that has not been
// freed already.
void ldstab_system_free(struct ldstab_system *sys);

// Release a string written to an out-parameter by this library. Passing
// null is a no-op.
//
// # Safety
// `s` must be null or a string pointer this library returned that has not
// been freed already.
void ldstab_string_free(char *s);

// Number of states n.
//
// # Safety
// `sys` must be a live handle from `ldstab_system_parse`.
size_t ldstab_system_state_count(const struct ldstab_system *sys);

// Number of subnetworks m.
//
// # Safety
// `sys` must be a live handle from `ldstab_system_parse`.
size_t ldstab_system_subnetwork_count(const struct ldstab_system *sys);

// One step from state `x` (1-based) under subnetwork `j` (1-based).
//
// # Safety
// `sys` must be a live handle and `out_state` writable.
enum LdstabStatus ldstab_system_step(const struct ldstab_system *sys,
                                     size_t x,
                                     size_t j,
                                     size_t *out_state);

// Run the full stability analysis and write the JSON report to
// `out_json` (release it with `ldstab_string_free`). Pass a null `target`
// to use the target bundled in the document.
//
// # Safety
// `sys` must be a live handle; `target` must be null or point to
// `target_len` readable entries; `out_json` must be writable.
enum LdstabStatus ldstab_analyze_json(const struct ldstab_system *sys,
                                      const size_t *target,
                                      size_t target_len,
                                      char **out_json);

// Exact k-step reachable-pattern ratio from `x0` into the target set,
// written as a double. Pass a null `target` to use the document's target.
//
// # Safety
// `sys` must be a live handle; `target` must be null or point to
// `target_len` readable entries; `out_ratio` must be writable.
enum LdstabStatus ldstab_ratio(const struct ldstab_system *sys,
                               size_t x0,
                               uint32_t k,
                               const size_t *target,
                               size_t target_len,
                               double *out_ratio);

// Render the state transition graph as DOT and write it to `out_dot`
// (release it with `ldstab_string_free`). The highlight flags fill the
// target states, outline the self-reachable states, and double-border the
// largest robustly invariant subset; target-dependent highlights need a
// target from either `target` or the document.
//
// # Safety
// `sys` must be a live handle; `target` must be null or point to
// `target_len` readable entries; `out_dot` must be writable.
enum LdstabStatus ldstab_stg_dot(const struct ldstab_system *sys,
                                 bool highlight_target,
                                 bool highlight_c0,
                                 bool highlight_lris,
                                 const size_t *target,
                                 size_t target_len,
                                 char **out_dot);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LDSTAB_H */
