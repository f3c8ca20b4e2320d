#ifndef DIAGK_H
#define DIAGK_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum DiagkComparison {
  DIAGK_COMPARISON_ISO_PRESERVING_UNIT = 0,
  DIAGK_COMPARISON_ISO_ONLY_FLIPPING_UNIT = 1,
  DIAGK_COMPARISON_ISO_EITHER_WAY = 2,
  DIAGK_COMPARISON_NOT_ISOMORPHIC = 3,
  DIAGK_COMPARISON_UNDECIDED = 4,
} DiagkComparison;

typedef enum DiagkMonoidEquality {
  DIAGK_MONOID_EQUALITY_EQUAL = 0,
  DIAGK_MONOID_EQUALITY_NOT_EQUAL = 1,
  DIAGK_MONOID_EQUALITY_UNKNOWN = 2,
} DiagkMonoidEquality;

typedef enum DiagkStatus {
  DIAGK_STATUS_OK = 0,
  DIAGK_STATUS_NULL_POINTER = 1,
  DIAGK_STATUS_INVALID_UTF8 = 2,
  DIAGK_STATUS_PARSE_ERROR = 3,
  DIAGK_STATUS_DOMAIN_ERROR = 4,
  DIAGK_STATUS_UNKNOWN_FIXTURE = 5,
  DIAGK_STATUS_PANIC = 6,
} DiagkStatus;

// Opaque graph handle.
typedef struct DiagkGraph DiagkGraph;

// Opaque K₀ handle.
typedef struct DiagkK0 DiagkK0;

// Message describing the last failure on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *diagk_last_error(void);

// Parses a graph in the line-based text format.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum DiagkStatus diagk_graph_parse(const char *text, struct DiagkGraph **out);

// Loads one of the shipped graphs: `e_infinity`, `e_infinity_minus`,
// `graph_e`, `graph_f`.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum DiagkStatus diagk_graph_fixture(const char *name, struct DiagkGraph **out);

// Releases a graph. NULL is ignored.
//
// # Safety
// `g` must come from this library and not be used afterwards.
void diagk_graph_free(struct DiagkGraph *g);

// # Safety
// `g` must be a live graph handle and `out` a valid pointer.
enum DiagkStatus diagk_graph_vertex_count(const struct DiagkGraph *g, size_t *out);

// Graphviz rendering; release the string with [`diagk_string_free`].
//
// # Safety
// `g` must be a live graph handle and `out` a valid pointer.
enum DiagkStatus diagk_graph_to_dot(const struct DiagkGraph *g, char **out);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void diagk_string_free(char *s);

// Computes K₀ (with K₁ rank) of a graph.
//
// # Safety
// `g` must be a live graph handle and `out` a valid pointer.
enum DiagkStatus diagk_k0_compute(const struct DiagkGraph *g, struct DiagkK0 **out);

// Releases a K₀ handle. NULL is ignored.
//
// # Safety
// `k` must come from this library and not be used afterwards.
void diagk_k0_free(struct DiagkK0 *k);

// # Safety
// `k` must be a live K₀ handle and `out` a valid pointer.
enum DiagkStatus diagk_k0_free_rank(const struct DiagkK0 *k, size_t *out);

// # Safety
// `k` must be a live K₀ handle and `out` a valid pointer.
enum DiagkStatus diagk_k0_k1_rank(const struct DiagkK0 *k, size_t *out);

// JSON description: invariant factors, free rank, vertex classes, unit and
// K₁ rank. Release the string with [`diagk_string_free`].
//
// # Safety
// `k` must be a live K₀ handle and `out` a valid pointer.
enum DiagkStatus diagk_k0_to_json(const struct DiagkK0 *k, char **out);

// Compares two K₀ groups together with their unit classes.
//
// # Safety
// `a`, `b` must be live K₀ handles and `out` a valid pointer.
enum DiagkStatus diagk_pointed_compare(const struct DiagkK0 *a,
                                       const struct DiagkK0 *b,
                                       enum DiagkComparison *out);

// Compares two graph monoid elements written like `v + 2*w + q{w: e0, e1}`.
//
// # Safety
// `g` must be a live graph handle, `x` and `y` NUL-terminated strings and
// `out` a valid pointer.
enum DiagkStatus diagk_monoid_equal(const struct DiagkGraph *g,
                                    const char *x,
                                    const char *y,
                                    uint64_t depth,
                                    enum DiagkMonoidEquality *out);

#endif  /* DIAGK_H */
