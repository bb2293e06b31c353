#ifndef RESALG_H
#define RESALG_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes of every fallible call.
typedef enum ResalgStatus {
  RESALG_STATUS_OK = 0,
  RESALG_STATUS_NULL_POINTER = 1,
  RESALG_STATUS_INVALID_ARGUMENT = 2,
  RESALG_STATUS_DIMENSION_MISMATCH = 3,
  RESALG_STATUS_PARSE = 4,
  RESALG_STATUS_NUMERICAL = 5,
  RESALG_STATUS_BUDGET = 6,
  RESALG_STATUS_PANIC = 7,
} ResalgStatus;

// A resolvent polynomial.
typedef struct ResalgPoly ResalgPoly;

// A truncated Fock representation.
typedef struct ResalgRep ResalgRep;

// A symplectic space with exact rational form.
typedef struct ResalgSpace ResalgSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *resalg_last_error(void);

// Library version as a static NUL-terminated string.
const char *resalg_version(void);

// Releases a string returned by the library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void resalg_string_free(char *s);

// The standard space of `modes` degrees of freedom (dimension 2·modes).
//
// # Safety
// `out` must be a valid pointer.
enum ResalgStatus resalg_space_standard(uintptr_t modes, struct ResalgSpace **out_space);

// A space from a row-major `dim × dim` form with entries num[k]/den[k].
//
// # Safety
// `num` and `den` must point to `dim·dim` values; `out` must be valid.
enum ResalgStatus resalg_space_from_form(const int64_t *num,
                                         const int64_t *den,
                                         uintptr_t dim,
                                         struct ResalgSpace **out_space);

// # Safety
// `space` must be a live handle or null.
uintptr_t resalg_space_dim(const struct ResalgSpace *space);

// Builds a symplectic basis exactly and reports max |Gram − J| (0 on success).
//
// # Safety
// `space` must be a live handle; `defect` a valid pointer.
enum ResalgStatus resalg_space_basis_defect(const struct ResalgSpace *space, double *defect);

// # Safety
// `space` must come from this library and not have been freed; null is ignored.
void resalg_space_free(struct ResalgSpace *space);

// Parses a polynomial from its JSON form.
//
// # Safety
// `json` must be NUL-terminated; `out` must be valid.
enum ResalgStatus resalg_poly_from_json(const char *json, struct ResalgPoly **out_poly);

// JSON form of a polynomial; exact rationals as "p/q" strings when `exact` is nonzero.
//
// # Safety
// `poly` must be a live handle; `out` must be valid. Free the result with `resalg_string_free`.
enum ResalgStatus resalg_poly_to_json(const struct ResalgPoly *poly,
                                      int32_t exact,
                                      char **out_json);

// Number of terms; 0 for the zero polynomial or a null handle.
//
// # Safety
// `poly` must be a live handle or null.
uintptr_t resalg_poly_terms(const struct ResalgPoly *poly);

// Rewrites `poly` toward normal form on `space`; a budget of 0 uses the default.
//
// # Safety
// Handles must be live; `out_poly` and `is_zero` must be valid.
enum ResalgStatus resalg_poly_simplify(const struct ResalgSpace *space,
                                       const struct ResalgPoly *poly,
                                       uintptr_t budget,
                                       struct ResalgPoly **out_poly,
                                       int32_t *is_zero);

// # Safety
// `poly` must come from this library and not have been freed; null is ignored.
void resalg_poly_free(struct ResalgPoly *poly);

// Truncated Fock representation of the standard space with `cutoff` levels per mode.
//
// # Safety
// `out` must be valid.
enum ResalgStatus resalg_rep_standard(uintptr_t modes,
                                      uintptr_t cutoff,
                                      struct ResalgRep **out_rep);

// # Safety
// `rep` must be a live handle or null.
uintptr_t resalg_rep_dim(const struct ResalgRep *rep);

// Operator norm of the truncated R(λ, f); `f` has 2·modes coordinates.
//
// # Safety
// `rep` must be live; `f` must point to `len` doubles; `norm` must be valid.
enum ResalgStatus resalg_rep_resolvent_norm(const struct ResalgRep *rep,
                                            double lambda,
                                            const double *f,
                                            uintptr_t len,
                                            double *norm);

// Vacuum expectation ⟨Ω, p Ω⟩ in the truncated representation.
//
// # Safety
// Handles must be live; `re` and `im` must be valid.
enum ResalgStatus resalg_rep_vacuum_value(const struct ResalgRep *rep,
                                          const struct ResalgPoly *poly,
                                          double *re,
                                          double *im);

// # Safety
// `rep` must come from this library and not have been freed; null is ignored.
void resalg_rep_free(struct ResalgRep *rep);

// Runs a verification suite ("relations", "rep", "laplace", "quasifree",
// "dirac", "cocycle", "lattice", "decompose") on a JSON config and returns
// the report as JSON. `failures` receives the number of failed records.
//
// # Safety
// Strings must be NUL-terminated; out pointers must be valid. Free the report
// with `resalg_string_free`.
enum ResalgStatus resalg_run_suite(const char *command,
                                   const char *config_json,
                                   char **out_report,
                                   uintptr_t *failures);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESALG_H */
