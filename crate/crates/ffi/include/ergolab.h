#ifndef ERGOLAB_H
#define ERGOLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ErgolabStatus {
  ERGOLAB_STATUS_OK = 0,
  ERGOLAB_STATUS_NULL_POINTER = 1,
  ERGOLAB_STATUS_INVALID_ARGUMENT = 2,
  ERGOLAB_STATUS_OUT_OF_RANGE = 3,
  ERGOLAB_STATUS_PARSE = 4,
  ERGOLAB_STATUS_IO = 5,
  // Caller buffer shorter than the data; the required length is still
  // written to the length out-parameter.
  ERGOLAB_STATUS_BUFFER_TOO_SMALL = 6,
  ERGOLAB_STATUS_INTERNAL = 7,
} ErgolabStatus;

// Dyadic Calderon-Zygmund decomposition.
typedef struct ErgolabDecomposition ErgolabDecomposition;

// Realized selector sequence.
typedef struct ErgolabSelector ErgolabSelector;

// Finitely supported real function on Z.
typedef struct ErgolabSignal ErgolabSignal;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *ergolab_last_error(void);

// NUL-terminated crate version; static storage.
const char *ergolab_version(void);

// Release a string returned by this library.
//
// # Safety
// `s` must come from this library and not be freed twice.
void ergolab_string_free(char *s);

// Selector sequence of length `length` with `tau_n = n^-alpha`.
//
// # Safety
// `out` must be valid for writes.
enum ErgolabStatus ergolab_selector_generate(size_t length,
                                             double alpha,
                                             uint64_t seed,
                                             struct ErgolabSelector **out);

// Selector sequence with explicit probabilities `tau[0..length]`.
//
// # Safety
// `tau` must point to `length` readable doubles; `out` must be valid for writes.
enum ErgolabStatus ergolab_selector_generate_explicit(const double *tau,
                                                      size_t length,
                                                      uint64_t seed,
                                                      struct ErgolabSelector **out);

// # Safety
// `s` must come from this library and not be freed twice.
void ergolab_selector_free(struct ErgolabSelector *s);

// Length, number of selections and `beta(N)`. Any out pointer may be null.
//
// # Safety
// `s` must be a live handle; non-null out pointers must be valid for writes.
enum ErgolabStatus ergolab_selector_stats(const struct ErgolabSelector *s,
                                          size_t *length,
                                          size_t *count,
                                          double *beta);

// Copy the bits `xi_1 .. xi_N` into `buf`.
//
// # Safety
// `s` must be a live handle, `buf` valid for `cap` writes, `len` for one.
enum ErgolabStatus ergolab_selector_bits(const struct ErgolabSelector *s,
                                         uint8_t *buf,
                                         size_t cap,
                                         size_t *len);

// Copy the selected positions, increasing, into `buf`.
//
// # Safety
// As for [`ergolab_selector_bits`].
enum ErgolabStatus ergolab_selector_positions(const struct ErgolabSelector *s,
                                              uint64_t *buf,
                                              size_t cap,
                                              size_t *len);

// Signal with `values[i]` at `offset + i`.
//
// # Safety
// `values` must point to `len` readable doubles; `out` must be valid for writes.
enum ErgolabStatus ergolab_signal_new(int64_t offset,
                                      const double *values,
                                      size_t len,
                                      struct ErgolabSignal **out);

// Signal from a literal such as `point:8@0+block:1@2..5`.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be valid for writes.
enum ErgolabStatus ergolab_signal_parse(const char *text, struct ErgolabSignal **out);

// # Safety
// `s` must come from this library and not be freed twice.
void ergolab_signal_free(struct ErgolabSignal *s);

// Leftmost support point; 0 for the zero signal.
//
// # Safety
// `s` must be a live handle and `offset` valid for writes.
enum ErgolabStatus ergolab_signal_offset(const struct ErgolabSignal *s, int64_t *offset);

// Copy the stored values, starting at the offset, into `buf`.
//
// # Safety
// `s` must be a live handle, `buf` valid for `cap` writes, `len` for one.
enum ErgolabStatus ergolab_signal_values(const struct ErgolabSignal *s,
                                         double *buf,
                                         size_t cap,
                                         size_t *len);

// Value at `x`.
//
// # Safety
// `s` must be a live handle and `value` valid for writes.
enum ErgolabStatus ergolab_signal_get(const struct ErgolabSignal *s, int64_t x, double *value);

// `f * g`.
//
// # Safety
// `f` and `g` must be live handles; `out` must be valid for writes.
enum ErgolabStatus ergolab_convolve(const struct ErgolabSignal *f,
                                    const struct ErgolabSignal *g,
                                    struct ErgolabSignal **out);

// `f * reflect(f)`.
//
// # Safety
// `f` must be a live handle; `out` must be valid for writes.
enum ErgolabStatus ergolab_autocorrelate(const struct ErgolabSignal *f, struct ErgolabSignal **out);

// `x -> f(-x)`.
//
// # Safety
// `f` must be a live handle; `out` must be valid for writes.
enum ErgolabStatus ergolab_signal_reflect(const struct ErgolabSignal *f,
                                          struct ErgolabSignal **out);

// Kernels `mu_j` and `nu_j` of a selector at scale `j`; either out
// pointer may be null.
//
// # Safety
// `s` must be a live handle; non-null out pointers must be valid for writes.
enum ErgolabStatus ergolab_kernel(const struct ErgolabSelector *s,
                                  uint32_t j,
                                  struct ErgolabSignal **mu,
                                  struct ErgolabSignal **nu);

// Height-`lambda` decomposition of `phi`.
//
// # Safety
// `phi` must be a live handle; `out` must be valid for writes.
enum ErgolabStatus ergolab_cz_decompose(const struct ErgolabSignal *phi,
                                        double lambda,
                                        struct ErgolabDecomposition **out);

// # Safety
// `d` must come from this library and not be freed twice.
void ergolab_decomposition_free(struct ErgolabDecomposition *d);

// Number of selected cubes.
//
// # Safety
// `d` must be a live handle and `count` valid for writes.
enum ErgolabStatus ergolab_decomposition_cube_count(const struct ErgolabDecomposition *d,
                                                    size_t *count);

// Scale `s` and index `k` of the `i`-th cube `[k 2^s, (k+1) 2^s)`.
//
// # Safety
// `d` must be a live handle; `s` and `k` must be valid for writes.
enum ErgolabStatus ergolab_decomposition_cube(const struct ErgolabDecomposition *d,
                                              size_t i,
                                              uint32_t *s,
                                              int64_t *k);

// Good part `g`.
//
// # Safety
// `d` must be a live handle; `out` must be valid for writes.
enum ErgolabStatus ergolab_decomposition_good(const struct ErgolabDecomposition *d,
                                              struct ErgolabSignal **out);

// Bad part `b = sum b_{s,k}`.
//
// # Safety
// `d` must be a live handle; `out` must be valid for writes.
enum ErgolabStatus ergolab_decomposition_bad(const struct ErgolabDecomposition *d,
                                             struct ErgolabSignal **out);

// Whether all decomposition invariants hold against `phi`, with
// reconstruction tolerance `tol`.
//
// # Safety
// `d` and `phi` must be live handles; `holds` must be valid for writes.
enum ErgolabStatus ergolab_decomposition_check(const struct ErgolabDecomposition *d,
                                               const struct ErgolabSignal *phi,
                                               double tol,
                                               bool *holds);

// JSON form of the decomposition; release with [`ergolab_string_free`].
//
// # Safety
// `d` must be a live handle; `out` must be valid for writes.
enum ErgolabStatus ergolab_decomposition_json(const struct ErgolabDecomposition *d, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ERGOLAB_H */
