#ifndef ALGDYN_H
#define ALGDYN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AlgdynStatus {
  ALGDYN_STATUS_OK = 0,
  ALGDYN_STATUS_NULL_POINTER = 1,
  ALGDYN_STATUS_INVALID_UTF8 = 2,
  ALGDYN_STATUS_PARSE_ERROR = 3,
  ALGDYN_STATUS_INVALID_INPUT = 4,
  ALGDYN_STATUS_NUMERIC_FAILURE = 5,
  ALGDYN_STATUS_PANIC = 6,
} AlgdynStatus;

typedef enum AlgdynEntropyKind {
  ALGDYN_ENTROPY_KIND_FINITE = 0,
  // A multiple of `log M(g)`; `value` holds `log M(g)`.
  ALGDYN_ENTROPY_KIND_MULTIPLE_OF_LOG_MAHLER_G = 1,
  // Sub-action of the `(u1, u2)`-plane; `value` is NaN.
  ALGDYN_ENTROPY_KIND_PLANAR_STRUCTURAL = 2,
} AlgdynEntropyKind;

// Integer Laurent polynomial.
typedef struct AlgdynPoly AlgdynPoly;

// System presented by `f(u1, u2)` and `g(u3)`.
typedef struct AlgdynSystem AlgdynSystem;

// Quadrature settings; zeroed fields take the defaults.
typedef struct AlgdynQuadrature {
  size_t nodes;
  uint32_t depth;
  double tolerance;
} AlgdynQuadrature;

typedef struct AlgdynValue {
  double value;
  double error;
  // Set when the error comes from a convergence test.
  bool heuristic;
  bool converged;
} AlgdynValue;

typedef struct AlgdynEtReport {
  bool is_expanding;
  double margin;
  bool is_triangular;
  int64_t a;
  bool is_et;
} AlgdynEtReport;

typedef struct AlgdynEntropy {
  enum AlgdynEntropyKind kind;
  struct AlgdynValue value;
} AlgdynEntropy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer stays
// valid until the next call into this library on the same thread.
const char *algdyn_last_error_message(void);

// Parses `text` as a Laurent polynomial in `arity` variables `u1..`.
//
// # Safety
// `text` must be NUL-terminated; `out` must be writable.
enum AlgdynStatus algdyn_poly_parse(const char *text, size_t arity, struct AlgdynPoly **out);

// # Safety
// `poly` must come from this library and not be freed twice; NULL is ignored.
void algdyn_poly_free(struct AlgdynPoly *poly);

// Canonical text of `poly`; release it with `algdyn_string_free`.
//
// # Safety
// `poly` must be a live handle; `out` must be writable.
enum AlgdynStatus algdyn_poly_format(const struct AlgdynPoly *poly, char **out);

// # Safety
// `s` must come from this library; NULL is ignored.
void algdyn_string_free(char *s);

// Logarithmic Mahler measure of a polynomial in one or two variables.
// `quad` may be NULL.
//
// # Safety
// `poly` must be a live handle; `out` must be writable.
enum AlgdynStatus algdyn_mahler(const struct AlgdynPoly *poly,
                                const struct AlgdynQuadrature *quad,
                                struct AlgdynValue *out);

// Builds a system from the texts of `f(u1, u2)` and `g(u3)`.
//
// # Safety
// The strings must be NUL-terminated; `out` must be writable.
enum AlgdynStatus algdyn_system_create(const char *name,
                                       const char *f,
                                       const char *g,
                                       struct AlgdynSystem **out);

// Reads a system file of `key = "value"` lines.
//
// # Safety
// `path` must be NUL-terminated; `out` must be writable.
enum AlgdynStatus algdyn_system_load(const char *path, struct AlgdynSystem **out);

// # Safety
// `system` must come from this library and not be freed twice; NULL is ignored.
void algdyn_system_free(struct AlgdynSystem *system);

// # Safety
// `system` must be a live handle; `out` must be writable.
enum AlgdynStatus algdyn_system_is_et(const struct AlgdynSystem *system,
                                      struct AlgdynEtReport *out);

// Entropy of the sub-action of the subgroup spanned by the rows
// `basis[0..3]` and `basis[3..6]`. `quad` may be NULL.
//
// # Safety
// `system` must be a live handle, `basis` must point to six integers and
// `out` must be writable.
enum AlgdynStatus algdyn_sublattice_entropy(const struct AlgdynSystem *system,
                                            const int64_t *basis,
                                            const struct AlgdynQuadrature *quad,
                                            struct AlgdynEntropy *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ALGDYN_H */
