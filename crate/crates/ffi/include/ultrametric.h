#ifndef ULTRAMETRIC_H
#define ULTRAMETRIC_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum UltraStatus {
  ULTRA_STATUS_OK = 0,
  ULTRA_STATUS_NULL_POINTER = 1,
  ULTRA_STATUS_INVALID_UTF8 = 2,
  ULTRA_STATUS_PARSE = 3,
  ULTRA_STATUS_INVALID_SPACE = 4,
  ULTRA_STATUS_HYPOTHESIS = 5,
  ULTRA_STATUS_VERIFICATION = 6,
  ULTRA_STATUS_OTHER = 7,
  ULTRA_STATUS_PANIC = 8,
} UltraStatus;

/**
 * Opaque handle to a validated finite ultrametric space.
 */
typedef struct UltraSpace UltraSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates a space from `{"points", "dist", "range_set"?}`.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum UltraStatus ultra_space_from_json(const char *json, struct UltraSpace **out);

/**
 * Releases a space. Null is ignored.
 *
 * # Safety
 * `space` must come from this library and not be freed twice.
 */
void ultra_space_free(struct UltraSpace *space);

/**
 * Serializes a space back to JSON.
 *
 * # Safety
 * `space` must be a live handle; `out` must be writable.
 */
enum UltraStatus ultra_space_to_json(const struct UltraSpace *space, char **out);

/**
 * Number of points.
 *
 * # Safety
 * `space` must be a live handle; `out` must be writable.
 */
enum UltraStatus ultra_space_len(const struct UltraSpace *space, size_t *out);

/**
 * Distance between two labelled points, as an exact rational string.
 *
 * # Safety
 * `space` must be a live handle; `x`, `y` nul-terminated; `out` writable.
 */
enum UltraStatus ultra_space_distance(const struct UltraSpace *space,
                                      const char *x,
                                      const char *y,
                                      char **out);

/**
 * `UD` distance between two metrics on the same points; "inf" when the
 * range set has no element above the largest disagreement.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum UltraStatus ultra_ud_distance(const struct UltraSpace *d,
                                   const struct UltraSpace *e,
                                   char **out);

/**
 * Runs an interpolation problem (`{"ambient", "family"}`) and writes the
 * result as JSON.
 *
 * # Safety
 * `problem` must be nul-terminated; `out` must be writable.
 */
enum UltraStatus ultra_interpolate_json(const char *problem, char **out);

/**
 * Decides `card(A) ≤ C (δ(A)/α(A))^α` over subsets of `space`.
 * `holds` receives 1 or 0; when it is 0 and `witness` is non-null, the
 * violating subset is written there as a JSON array of labels.
 *
 * # Safety
 * `space` must be live; `c`, `alpha` nul-terminated; `holds` writable.
 */
enum UltraStatus ultra_doubling_check(const struct UltraSpace *space,
                                      const char *c,
                                      const char *alpha,
                                      int *holds,
                                      char **witness);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void ultra_string_free(char *s);

/**
 * Message for the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *ultra_last_error_message(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ULTRAMETRIC_H */
