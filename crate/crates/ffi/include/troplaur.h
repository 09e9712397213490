#ifndef TROPLAUR_H
#define TROPLAUR_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result of every call.
 */
typedef enum TlStatus {
  TL_STATUS_OK = 0,
  TL_STATUS_NULL_POINTER = 1,
  TL_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed spec, report or updates JSON.
   */
  TL_STATUS_INVALID_INPUT = 3,
  /**
   * Arguments outside an operation's domain.
   */
  TL_STATUS_DOMAIN = 4,
  /**
   * A numerical procedure did not converge or could not decide.
   */
  TL_STATUS_NUMERICAL = 5,
  TL_STATUS_OUT_OF_RANGE = 6,
  TL_STATUS_PANIC = 7,
} TlStatus;

typedef enum TlCombine {
  TL_COMBINE_REPLACE = 0,
  TL_COMBINE_MAX = 1,
} TlCombine;

typedef enum TlMode {
  TL_MODE_WIDE = 0,
  TL_MODE_SHARP = 1,
} TlMode;

typedef enum TlNorm {
  /**
   * The spec's norm, or the 2-norm.
   */
  TL_NORM_DEFAULT = 0,
  TL_NORM_ONE = 1,
  TL_NORM_TWO = 2,
  TL_NORM_INF = 3,
  TL_NORM_FRO = 4,
} TlNorm;

/**
 * Polygon, roots and limits of a scalar series.
 */
typedef struct TlPolygon TlPolygon;

typedef struct TlReport TlReport;

/**
 * A parsed series spec.
 */
typedef struct TlSeries TlSeries;

/**
 * One tropical root. `multiplicity` is 0 when `infinite` is set.
 */
typedef struct TlRoot {
  double log_alpha;
  uint64_t multiplicity;
  bool infinite;
} TlRoot;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *tl_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void tl_string_free(char *s);

/**
 * Parses a series spec document.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum TlStatus tl_series_from_json(const char *json, struct TlSeries **out);

/**
 * # Safety
 * `s` must come from [`tl_series_from_json`] and not be freed twice.
 */
void tl_series_free(struct TlSeries *s);

/**
 * Certified polygon over `[lo, hi]`, or the spec's default window when
 * `use_window` is false. `updates_json` may be null.
 *
 * # Safety
 * `series` must be a live handle, `updates_json` null or a nul-terminated
 * string, and `out` writable.
 */
enum TlStatus tl_polygon_compute(const struct TlSeries *series,
                                 bool use_window,
                                 int64_t lo,
                                 int64_t hi,
                                 const char *updates_json,
                                 enum TlCombine combine,
                                 struct TlPolygon **out);

/**
 * # Safety
 * `p` must come from [`tl_polygon_compute`] and not be freed twice.
 */
void tl_polygon_free(struct TlPolygon *p);

/**
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum TlStatus tl_polygon_vertex_count(const struct TlPolygon *p, size_t *out);

/**
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum TlStatus tl_polygon_root_count(const struct TlPolygon *p, size_t *out);

/**
 * Root `index` in increasing order.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum TlStatus tl_polygon_root(const struct TlPolygon *p, size_t index, struct TlRoot *out);

/**
 * Polygon, roots, limits and update outcomes as JSON.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum TlStatus tl_polygon_to_json(const struct TlPolygon *p, char **out);

/**
 * Localization report for a series. `updates_json` may be null.
 *
 * # Safety
 * `series` must be a live handle, `updates_json` null or a nul-terminated
 * string, and `out` writable.
 */
enum TlStatus tl_report_compute(const struct TlSeries *series,
                                enum TlMode mode,
                                enum TlNorm norm,
                                const char *updates_json,
                                struct TlReport **out);

/**
 * # Safety
 * `json` must be a nul-terminated string and `out` writable.
 */
enum TlStatus tl_report_from_json(const char *json, struct TlReport **out);

/**
 * # Safety
 * `r` must be a live handle and `out` writable.
 */
enum TlStatus tl_report_to_json(const struct TlReport *r, char **out);

/**
 * Number of applicable items in the report.
 *
 * # Safety
 * `r` must be a live handle and `out` writable.
 */
enum TlStatus tl_report_applicable_count(const struct TlReport *r, size_t *out);

/**
 * # Safety
 * `r` must come from this library and not be freed twice.
 */
void tl_report_free(struct TlReport *r);

/**
 * Quadrature nodes for a contour at the `disk`-th inclusion disk (from 1).
 *
 * # Safety
 * `r` must be a live handle and `out` writable.
 */
enum TlStatus tl_advise_nodes(const struct TlReport *r, double epsilon, size_t disk, uint64_t *out);

/**
 * Counts report items the winding oracle contradicts.
 *
 * # Safety
 * Both handles must be live and `mismatches` writable.
 */
enum TlStatus tl_validate(const struct TlSeries *series,
                          const struct TlReport *r,
                          size_t *mismatches);

/**
 * Roots `f <= g` of the localization quadratic.
 *
 * # Safety
 * `f` and `g` must be writable.
 */
enum TlStatus tl_key_roots(double delta, double c, double *f, double *g);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TROPLAUR_H */
