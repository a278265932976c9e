#ifndef FUZZOBS_H
#define FUZZOBS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum FzStatus {
  FZ_STATUS_OK = 0,
  FZ_STATUS_NULL_POINTER = 1,
  // Malformed input: bad length, bad JSON, bad UTF-8.
  FZ_STATUS_INVALID_ARGUMENT = 2,
  // Well-formed input that breaks a mathematical invariant.
  FZ_STATUS_INVARIANT_VIOLATION = 3,
  // The operation does not apply to this input.
  FZ_STATUS_PRECONDITION = 4,
  // Brute-force size cap exceeded.
  FZ_STATUS_TOO_LARGE = 5,
  // Internal failure, including a caught panic.
  FZ_STATUS_INTERNAL = 6,
} FzStatus;

// Truncated circle coefficient matrix.
typedef struct FzCMatrix FzCMatrix;

// Probability measure on `Z_N`.
typedef struct FzMeasure FzMeasure;

// Observable on `Z_N` with effects on `C^dim`.
typedef struct FzObservable FzObservable;

// Stern-Gerlach analysis.
typedef struct FzSgReport {
  bool is_sharp;
  bool has_norm_one;
  bool is_regular;
  bool is_info_equivalent;
  bool is_trivial;
  double norm_up;
  double norm_down;
} FzSgReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next `fz_*` call on the same thread.
const char *fz_last_error(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a pointer obtained from this library and not yet freed.
void fz_string_free(char *s);

// Probability measure from `order` weights; sums within 1e-9 of one are
// renormalized.
//
// # Safety
// `weights` must point to `order` doubles; `out` must be writable.
enum FzStatus fz_measure_new(uintptr_t order, const double *weights, struct FzMeasure **out);

// # Safety
// `m` must be null or a live handle from this library.
void fz_measure_free(struct FzMeasure *m);

// # Safety
// `m` must be a live handle; `out` must be writable.
enum FzStatus fz_measure_order(const struct FzMeasure *m, uintptr_t *out);

// Copies the `order` weights into `out`.
//
// # Safety
// `m` must be a live handle; `out` must hold `len` doubles.
enum FzStatus fz_measure_weights(const struct FzMeasure *m, double *out, uintptr_t len);

// Whether smearing by `m` keeps every distinction of the sharp observable:
// no transform value has modulus at or below `tol`.
//
// # Safety
// `m` must be a live handle; both outputs must be writable.
enum FzStatus fz_measure_info_equivalent(const struct FzMeasure *m,
                                         double tol,
                                         bool *out_equivalent,
                                         double *out_min_abs_transform);

// Smearing of the canonical sharp observable on `C^N (x) C^multiplicity`.
//
// # Safety
// `m` must be a live handle; `out` must be writable.
enum FzStatus fz_observable_smear(const struct FzMeasure *m,
                                  uintptr_t multiplicity,
                                  struct FzObservable **out);

// # Safety
// `e` must be null or a live handle from this library.
void fz_observable_free(struct FzObservable *e);

// # Safety
// `e` must be a live handle; `out` must be writable.
enum FzStatus fz_observable_order(const struct FzObservable *e, uintptr_t *out);

// # Safety
// `e` must be a live handle; `out` must be writable.
enum FzStatus fz_observable_dim(const struct FzObservable *e, uintptr_t *out);

// Copies atom `x` as `2 dim^2` doubles: row-major, real and imaginary parts
// interleaved.
//
// # Safety
// `e` must be a live handle; `out` must hold `len` doubles.
enum FzStatus fz_observable_atom(const struct FzObservable *e,
                                 uintptr_t x,
                                 double *out,
                                 uintptr_t len);

// Covariance under the canonical shift representation.
//
// # Safety
// `e` must be a live handle; both outputs must be writable.
enum FzStatus fz_observable_covariance(const struct FzObservable *e,
                                       double tol,
                                       bool *out_covariant,
                                       double *out_max_deviation);

// Norm-1 property by exhaustive subset scan (N <= 16).
//
// # Safety
// `e` must be a live handle; `out_holds` must be writable.
enum FzStatus fz_observable_norm_one(const struct FzObservable *e, double tol, bool *out_holds);

// Regularity by exhaustive subset scan (N <= 16). The witness is the
// bitmask of the smallest failing outcome set, zero when regular.
//
// # Safety
// `e` must be a live handle; both outputs must be writable.
enum FzStatus fz_observable_regular(const struct FzObservable *e,
                                    double tol,
                                    bool *out_regular,
                                    uint64_t *out_witness_mask);

// Outcome distribution in the pure state given as `2 dim` interleaved
// doubles; writes `N` probabilities.
//
// # Safety
// `e` must be a live handle; `state` must hold `state_len` doubles and
// `out` must hold `out_len` doubles.
enum FzStatus fz_observable_distribution(const struct FzObservable *e,
                                         const double *state,
                                         uintptr_t state_len,
                                         double *out,
                                         uintptr_t out_len);

// Smearing measure of a covariant smearing of the canonical sharp
// observable; `Precondition` if none exists.
//
// # Safety
// `e` must be a live handle; `out` must be writable.
enum FzStatus fz_observable_extract_measure(const struct FzObservable *e, struct FzMeasure **out);

// Parses an observable document `{"N", "dim", "atoms"}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum FzStatus fz_observable_from_json(const char *json, struct FzObservable **out);

// Serializes to an observable document; release with `fz_string_free`.
//
// # Safety
// `e` must be a live handle; `out` must be writable.
enum FzStatus fz_observable_to_json(const struct FzObservable *e, char **out);

// Commutative non-Toeplitz coefficient matrix of half-width `k >= 1`.
//
// # Safety
// `out` must be writable.
enum FzStatus fz_cmatrix_toigo(uintptr_t k, struct FzCMatrix **out);

// Parses a coefficient-matrix document `{"K", "entries"}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum FzStatus fz_cmatrix_from_json(const char *json, struct FzCMatrix **out);

// # Safety
// `c` must be null or a live handle from this library.
void fz_cmatrix_free(struct FzCMatrix *c);

// Unit diagonal, Hermiticity, entries bounded by one and positivity of
// every centred window.
//
// # Safety
// `c` must be a live handle; `out_valid` must be writable.
enum FzStatus fz_cmatrix_validate(const struct FzCMatrix *c, bool *out_valid);

// Toeplitz test, equivalent to commuting with the sharp localization.
//
// # Safety
// `c` must be a live handle; `out_toeplitz` must be writable.
enum FzStatus fz_cmatrix_is_toeplitz(const struct FzCMatrix *c, bool *out_toeplitz);

// Two-outcome spin observable `E_up = diag(a, b)`.
//
// # Safety
// `out` must be writable.
enum FzStatus fz_sg_analyze(double a, double b, double tol, struct FzSgReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FUZZOBS_H */
