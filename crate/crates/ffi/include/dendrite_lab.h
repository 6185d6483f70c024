#ifndef DENDRITE_LAB_H
#define DENDRITE_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every entry point.
 */
typedef enum DlStatus {
  DL_STATUS_OK = 0,
  DL_STATUS_NULL_POINTER = 1,
  DL_STATUS_INVALID_UTF8 = 2,
  DL_STATUS_PARSE = 3,
  DL_STATUS_INVALID_SYSTEM = 4,
  DL_STATUS_NOT_A_DENDRITE = 5,
  DL_STATUS_BUDGET_EXCEEDED = 6,
  DL_STATUS_COMPUTATION = 7,
  DL_STATUS_PANIC = 8,
} DlStatus;

/**
 * Opaque handle to a parsed system of similarities.
 */
typedef struct DlSystem DlSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *dl_version(void);

/**
 * Message for the last failed call on this thread, or null. Valid until the next call.
 */
const char *dl_last_error_message(void);

/**
 * Parses a JSON system description into a new handle.
 */
enum DlStatus dl_system_from_json(const char *json, struct DlSystem **out);

/**
 * Releases a handle. Null is ignored.
 */
void dl_system_free(struct DlSystem *system);

/**
 * Number of maps, or 0 for a null handle.
 */
size_t dl_system_map_count(const struct DlSystem *system);

/**
 * Ambient dimension, or 0 for a null handle.
 */
size_t dl_system_dimension(const struct DlSystem *system);

/**
 * Checks D1–D4 and connectivity. `is_dendrite` receives 1 or 0; the
 * validation report is written to `report_json` when it is not null.
 */
enum DlStatus dl_validate(const struct DlSystem *system, int *is_dendrite, char **report_json);

/**
 * Dimension report as JSON. With `depths` null or `depth_count` 0 the default
 * cover depths are used.
 */
enum DlStatus dl_dimensions(const struct DlSystem *system,
                            const size_t *depths,
                            size_t depth_count,
                            char **report_json);

/**
 * Order report for the point with `coord_count` coordinates at `coords`.
 * `stabilization_depth` 0 selects the default.
 */
enum DlStatus dl_point_order(const struct DlSystem *system,
                             const double *coords,
                             size_t coord_count,
                             size_t stabilization_depth,
                             char **report_json);

/**
 * Solves Σ rᵢ^s = 1 for the similarity dimension s.
 */
enum DlStatus dl_moran_dimension(const double *ratios, size_t count, double *out);

/**
 * Releases a string returned by this library. Null is ignored.
 */
void dl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DENDRITE_LAB_H */
