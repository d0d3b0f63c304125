#ifndef POLYSUM_H
#define POLYSUM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PolysumStatus {
  POLYSUM_STATUS_OK = 0,
  POLYSUM_STATUS_INVALID_ARGUMENT = 1,
  POLYSUM_STATUS_OVERFLOW = 2,
  POLYSUM_STATUS_NOT_FOUND = 3,
  POLYSUM_STATUS_RESOURCE = 4,
  POLYSUM_STATUS_IO = 5,
  POLYSUM_STATUS_FORMAT = 6,
  POLYSUM_STATUS_NULL_POINTER = 7,
  POLYSUM_STATUS_PANIC = 8,
} PolysumStatus;

// Opaque practical-number sieve.
typedef struct PolysumSieve PolysumSieve;

// `n = practical + T(tri_index)` with the 2-adic data behind it.
typedef struct PolysumTriDecomposition {
  uint64_t n;
  uint64_t practical;
  uint64_t tri_index;
  uint64_t x;
  uint32_t m;
  uint64_t cofactor;
} PolysumTriDecomposition;

// `n = practical + P_s(x) + P_s(y)`; `certification` is 0 for the quotient
// bound and 1 for a direct check.
typedef struct PolysumPolyDecomposition {
  uint64_t n;
  uint32_t s;
  uint64_t practical;
  uint64_t x;
  uint64_t y;
  uint32_t r;
  uint32_t k;
  uint64_t n_k;
  uint32_t certification;
} PolysumPolyDecomposition;

// `largest` is meaningful only when `count > 0`.
typedef struct PolysumSurveyRow {
  uint32_t s;
  uint64_t bound;
  bool allow_zero;
  uint64_t count;
  uint64_t largest;
} PolysumSurveyRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code.
const char *polysum_status_string(enum PolysumStatus status);

// Message of the last failure on this thread, or null if none. The pointer
// stays valid until the next failing call on the same thread.
const char *polysum_last_error_message(void);

// # Safety
// `out` must be null or valid for writes.
enum PolysumStatus polysum_is_practical(uint64_t n, bool *out);

// `P_s(k)`; reports overflow when it does not fit 64 bits.
//
// # Safety
// `out` must be null or valid for writes.
enum PolysumStatus polysum_polygonal(uint32_t s, uint64_t k, uint64_t *out);

// # Safety
// `out` must be null or valid for writes.
enum PolysumStatus polysum_decompose_tri(uint64_t n, struct PolysumTriDecomposition *out);

// Search-mode decomposition into a practical number and two s-gonal numbers.
//
// # Safety
// `out` must be null or valid for writes.
enum PolysumStatus polysum_decompose_poly(uint32_t s,
                                          uint64_t n,
                                          uint32_t r,
                                          uint32_t max_k,
                                          struct PolysumPolyDecomposition *out);

// Census row for practical plus one s-gonal number over `[1, bound)`.
//
// # Safety
// `out` must be null or valid for writes.
enum PolysumStatus polysum_survey_row(uint32_t s,
                                      uint64_t bound,
                                      bool allow_zero,
                                      struct PolysumSurveyRow *out);

// # Safety
// `out` must be null or valid for writes. The handle written there must be
// released with `polysum_sieve_free`.
enum PolysumStatus polysum_sieve_new(uint64_t bound, struct PolysumSieve **out);

// Reads a sieve written by `polysum_sieve_save` or `polysum practical sieve`.
//
// # Safety
// `path` must be null or a nul-terminated string; `out` must be null or
// valid for writes.
enum PolysumStatus polysum_sieve_load(const char *path, struct PolysumSieve **out);

// # Safety
// `sieve` must be null or a live handle; `path` must be null or a
// nul-terminated string.
enum PolysumStatus polysum_sieve_save(const struct PolysumSieve *sieve, const char *path);

// # Safety
// `sieve` must be null or a live handle; `out` must be null or valid for writes.
enum PolysumStatus polysum_sieve_bound(const struct PolysumSieve *sieve, uint64_t *out);

// Whether `n` is practical; `n` must not exceed the sieve bound.
//
// # Safety
// `sieve` must be null or a live handle; `out` must be null or valid for writes.
enum PolysumStatus polysum_sieve_contains(const struct PolysumSieve *sieve, uint64_t n, bool *out);

// Number of practical numbers up to the bound.
//
// # Safety
// `sieve` must be null or a live handle; `out` must be null or valid for writes.
enum PolysumStatus polysum_sieve_count(const struct PolysumSieve *sieve, uint64_t *out);

// [`polysum_survey_row`] reusing a sieve that covers the bound.
//
// # Safety
// `sieve` must be null or a live handle; `out` must be null or valid for writes.
enum PolysumStatus polysum_sieve_survey_row(const struct PolysumSieve *sieve,
                                            uint32_t s,
                                            uint64_t bound,
                                            bool allow_zero,
                                            struct PolysumSurveyRow *out);

// Releases a sieve; null is ignored.
//
// # Safety
// `sieve` must be null or a handle not yet freed.
void polysum_sieve_free(struct PolysumSieve *sieve);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYSUM_H */
