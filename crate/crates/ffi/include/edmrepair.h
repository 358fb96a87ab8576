#ifndef EDMREPAIR_H
#define EDMREPAIR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EdmStatus {
  EDM_STATUS_OK = 0,
  // The question has answer "no" (not embeddable, no solution).
  EDM_STATUS_NO = 1,
  EDM_STATUS_NULL_ARGUMENT = 2,
  EDM_STATUS_INVALID_INPUT = 3,
  EDM_STATUS_TOO_LARGE = 4,
  EDM_STATUS_UNSUPPORTED = 5,
  // An output buffer was too small; the needed length was written.
  EDM_STATUS_BUFFER_TOO_SMALL = 6,
  EDM_STATUS_PANIC = 7,
} EdmStatus;

// Distance space plus dimension, budgets and weights.
typedef struct EdmInstance EdmInstance;

// Outliers, modified pairs with new squared distances, and total cost.
typedef struct EdmSolution EdmSolution;

// Squared distance matrix.
typedef struct EdmSpace EdmSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Owned by the
// library; valid until the next call.
const char *edm_last_error(void);

// Library version as a static NUL-terminated string.
const char *edm_version(void);

// Builds a space from a row-major `n`×`n` matrix of squared distances.
//
// # Safety
// `sq` must point to `n * n` readable doubles; `out` must be writable.
enum EdmStatus edm_space_new(const double *sq, size_t n, struct EdmSpace **out);

// # Safety
// `space` must be null or a handle from [`edm_space_new`] not yet freed.
void edm_space_free(struct EdmSpace *space);

// # Safety
// `space` must be a live handle or null.
size_t edm_space_len(const struct EdmSpace *space);

// Whether the points `pts` (all points when null) embed in R^r. Writes the
// answer to `out` and also returns `Ok` or `No`.
//
// # Safety
// `space` must be live; `pts` must hold `npts` values when non-null.
enum EdmStatus edm_is_embeddable(const struct EdmSpace *space,
                                 const size_t *pts,
                                 size_t npts,
                                 ptrdiff_t r,
                                 bool exact,
                                 bool *out);

// Cayley–Menger determinant of `pts`.
//
// # Safety
// `space` must be live; `pts` must hold `npts` values; `out` writable.
enum EdmStatus edm_cm_det(const struct EdmSpace *space,
                          const size_t *pts,
                          size_t npts,
                          bool exact,
                          double *out);

// Writes an `n`×`d` row-major realization to `coords` (which must hold
// `n * d` doubles), or returns `No` when the space does not embed in R^d.
//
// # Safety
// `space` must be live; `coords` must be writable for `n * d` doubles.
enum EdmStatus edm_realize(const struct EdmSpace *space, size_t d, double *coords);

// Unit-weight instance over a copy of `space`; `budget` 0 means the sum
// of all weights.
//
// # Safety
// `space` must be live; `out` writable.
enum EdmStatus edm_instance_new(const struct EdmSpace *space,
                                size_t d,
                                size_t k_out,
                                size_t k_mod,
                                uint64_t budget,
                                struct EdmInstance **out);

// Parses the JSON instance format used by the command-line tool.
//
// # Safety
// `json` must be a NUL-terminated string; `out` writable.
enum EdmStatus edm_instance_from_json(const char *json, struct EdmInstance **out);

// # Safety
// `inst` must be null or a live handle.
void edm_instance_free(struct EdmInstance *inst);

// # Safety
// `inst` must be live; `w` must hold one weight per point.
enum EdmStatus edm_instance_set_outlier_weights(struct EdmInstance *inst,
                                                const uint64_t *w,
                                                size_t n);

// # Safety
// `inst` must be live.
enum EdmStatus edm_instance_set_pair_weight(struct EdmInstance *inst,
                                            size_t a,
                                            size_t b,
                                            uint64_t w);

// Optimal outlier-only solution; `No` (and a null handle) when none exists.
//
// # Safety
// `inst` must be live; `out` writable.
enum EdmStatus edm_solve_eeo(const struct EdmInstance *inst, bool exact, struct EdmSolution **out);

// Cheapest solution with outliers and modified distances.
//
// # Safety
// `inst` must be live; `out` writable.
enum EdmStatus edm_solve_weeo(const struct EdmInstance *inst,
                              bool exact,
                              uint64_t seed,
                              struct EdmSolution **out);

// Approximate outlier set ignoring k_out: greedy when `trials` is 0 and
// `randomized` is false, otherwise the randomized 2-approximation with
// `trials` trials per dimension guess (0 for the default).
//
// # Safety
// `inst` must be live; `out` writable.
enum EdmStatus edm_approx_outliers(const struct EdmInstance *inst,
                                   bool randomized,
                                   uint64_t seed,
                                   size_t trials,
                                   struct EdmSolution **out);

// # Safety
// `sol` must be null or a live handle.
void edm_solution_free(struct EdmSolution *sol);

// # Safety
// `sol` must be live or null.
uint64_t edm_solution_cost(const struct EdmSolution *sol);

// Copies outlier indices into `buf`. `len` receives the count; returns
// `BufferTooSmall` when `cap` is less than that.
//
// # Safety
// `sol` must be live; `buf` must hold `cap` values; `len` writable.
enum EdmStatus edm_solution_outliers(const struct EdmSolution *sol,
                                     size_t *buf,
                                     size_t cap,
                                     size_t *len);

// Copies modified pairs as parallel arrays `(a[k], b[k]) -> sq[k]`.
//
// # Safety
// `sol` must be live; the three buffers must hold `cap` values; `len` writable.
enum EdmStatus edm_solution_modifications(const struct EdmSolution *sol,
                                          size_t *a,
                                          size_t *b,
                                          double *sq,
                                          size_t cap,
                                          size_t *len);

// Solution in the command-line JSON format. Free with [`edm_string_free`].
//
// # Safety
// Both handles must be live and `sol` must answer `inst`.
char *edm_solution_to_json(const struct EdmInstance *inst, const struct EdmSolution *sol);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void edm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EDMREPAIR_H */
