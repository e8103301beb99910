#ifndef FLOWCRIT_H
#define FLOWCRIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every function in this interface.
 */
typedef enum FcStatus {
  FC_STATUS_OK = 0,
  FC_STATUS_NULL_POINTER = 1,
  /**
   * Malformed graph text or invalid UTF-8.
   */
  FC_STATUS_PARSE = 2,
  /**
   * A solver size limit was exceeded.
   */
  FC_STATUS_CAP = 3,
  FC_STATUS_INVALID_ARGUMENT = 4,
  /**
   * A proven bound failed; always a bug in the library.
   */
  FC_STATUS_BOUND_VIOLATED = 5,
  /**
   * A panic was caught at the boundary.
   */
  FC_STATUS_INTERNAL = 6,
} FcStatus;

/**
 * Opaque graph handle.
 */
typedef struct FcGraph FcGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *fc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fc_version(void);

/**
 * Empty graph on `n` vertices.
 *
 * # Safety
 * `out` must be valid for writing a pointer.
 */
enum FcStatus fc_graph_new(size_t n, struct FcGraph **out);

/**
 * Parses the edge-list format (`n m` header, then `m` lines `u v`).
 *
 * # Safety
 * `text_in` must be a NUL-terminated string; `out` must be valid for writing.
 */
enum FcStatus fc_graph_from_edge_list(const char *text_in, struct FcGraph **out);

/**
 * Parses one graph6 string.
 *
 * # Safety
 * `text_in` must be a NUL-terminated string; `out` must be valid for writing.
 */
enum FcStatus fc_graph_from_graph6(const char *text_in, struct FcGraph **out);

/**
 * Adds the edge `uv` and stores its id in `id_out` (may be NULL).
 *
 * # Safety
 * `g` must be a live handle; `id_out` must be NULL or valid for writing.
 */
enum FcStatus fc_graph_add_edge(struct FcGraph *g, size_t u, size_t v, uint32_t *id_out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `g` must be NULL or a handle not yet freed.
 */
void fc_graph_free(struct FcGraph *g);

/**
 * Vertex count, or 0 for NULL.
 *
 * # Safety
 * `g` must be NULL or a live handle.
 */
size_t fc_graph_vertex_count(const struct FcGraph *g);

/**
 * Edge count, or 0 for NULL.
 *
 * # Safety
 * `g` must be NULL or a live handle.
 */
size_t fc_graph_edge_count(const struct FcGraph *g);

/**
 * Whether the graph has a modulo-3 orientation.
 *
 * # Safety
 * `g` must be a live handle and `out` valid for writing.
 */
enum FcStatus fc_has_mod3_orientation(const struct FcGraph *g, bool *out);

/**
 * Whether the graph is Z3-connected.
 *
 * # Safety
 * `g` must be a live handle and `out` valid for writing.
 */
enum FcStatus fc_is_z3_connected(const struct FcGraph *g, bool *out);

/**
 * Whether the graph is 3-flow-critical.
 *
 * # Safety
 * `g` must be a live handle and `out` valid for writing.
 */
enum FcStatus fc_is_3_flow_critical(const struct FcGraph *g, bool *out);

/**
 * Minimum partition potential.
 *
 * # Safety
 * `g` must be a live handle and `out` valid for writing.
 */
enum FcStatus fc_rho_min(const struct FcGraph *g, int64_t *out);

/**
 * Runs one decision and returns its certificate as JSON. `command` is one
 * of `flow`, `z3`, `critical`, `reduce`, `rho`, `structure`, `bounds`.
 *
 * # Safety
 * `g` must be a live handle, `command` NUL-terminated and `out` valid for
 * writing. The string stored in `out` must be released with
 * `fc_string_free`.
 */
enum FcStatus fc_decide_json(const struct FcGraph *g, const char *command, char **out);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a string from this library not yet freed.
 */
void fc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLOWCRIT_H */
