#ifndef TRENDBAND_H
#define TRENDBAND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum TbStatus {
  TB_OK = 0,
  TB_NULL_POINTER = 1,
  TB_INVALID_ARGUMENT = 2,
  TB_NON_FINITE_SAMPLE = 3,
  TB_SERIES_TOO_SHORT = 4,
  TB_DEGENERATE_SERIES = 5,
  TB_NUMERICAL = 6,
  TB_INTERNAL = 99,
} TbStatus;

// Detector settings. Starts from the library defaults.
typedef struct TbConfig TbConfig;

// Result of one offline detection pass. Immutable.
typedef struct TbReport TbReport;

// Online detector state for one series. Not thread-safe; serialize pushes.
typedef struct TbStream TbStream;

// Static, NUL-terminated description of `status`.
const char *tb_status_message(enum TbStatus status);

// Library version, NUL-terminated.
const char *tb_version(void);

// New configuration with default settings. Release with `tb_config_free`.
struct TbConfig *tb_config_new(void);

// # Safety
// `config` must be null or a handle from `tb_config_new` not yet freed.
void tb_config_free(struct TbConfig *config);

// Weight of the per-bucket deviation in the bounds, in [0, 1].
//
// # Safety
// `config` must be a live handle.
enum TbStatus tb_config_set_alpha(struct TbConfig *config, double alpha);

// # Safety
// `config` must be a live handle.
enum TbStatus tb_config_set_fas_threshold(struct TbConfig *config, double threshold);

// # Safety
// `config` must be a live handle.
enum TbStatus tb_config_set_bound_multiplier(struct TbConfig *config, double multiplier);

// Runs offline detection on `values[0..len]`. `config` may be null for
// defaults. On success `*out` receives a report to release with
// `tb_report_free`.
//
// # Safety
// `values` must point to `len` readable doubles; `config` must be null or
// live; `out` must be writable.
enum TbStatus tb_detect_offline(const struct TbConfig *config,
                                const double *values,
                                size_t len,
                                bool optimized,
                                struct TbReport **out);

// Dominant period of `values[0..len]`; writes 0 when none is found.
//
// # Safety
// As for `tb_detect_offline`; `period` must be writable.
enum TbStatus tb_detect_periodicity(const struct TbConfig *config,
                                    const double *values,
                                    size_t len,
                                    size_t *period);

// # Safety
// `report` must be null or a live report handle.
void tb_report_free(struct TbReport *report);

// Anomaly indices, ascending.
//
// # Safety
// `report` must be live; `out` must hold `capacity` elements or be null.
size_t tb_report_anomalies(const struct TbReport *report, size_t *out, size_t capacity);

// Indices beyond the residual bounds before the FAS filter, ascending.
//
// # Safety
// As for `tb_report_anomalies`.
size_t tb_report_candidates(const struct TbReport *report, size_t *out, size_t capacity);

// FAS score per bucket.
//
// # Safety
// As for `tb_report_anomalies`.
size_t tb_report_fas(const struct TbReport *report, double *out, size_t capacity);

// Bucket boundaries as `[start0, end0, start1, end1, ...]`; returns the
// number of buckets, so `out` needs `2 * count` slots.
//
// # Safety
// `report` must be live; `out` must hold `capacity` elements or be null.
size_t tb_report_buckets(const struct TbReport *report, size_t *out, size_t capacity);

// Period used by the pass, 0 when the series was treated as aperiodic.
//
// # Safety
// `report` must be null or live.
size_t tb_report_period(const struct TbReport *report);

// New online detector; `config` (may be null) is copied.
// Release with `tb_stream_free`.
//
// # Safety
// `config` must be null or live.
struct TbStream *tb_stream_new(const struct TbConfig *config);

// # Safety
// `stream` must be null or a live stream handle.
void tb_stream_free(struct TbStream *stream);

// Appends one sample. `*ran` tells whether detection was re-run and
// `*is_anomaly` whether the new sample was flagged. Either out pointer may
// be null.
//
// # Safety
// `stream` must be live and not used concurrently.
enum TbStatus tb_stream_push(struct TbStream *stream, double sample, bool *ran, bool *is_anomaly);

// Number of full detection runs so far.
//
// # Safety
// `stream` must be null or live.
uint64_t tb_stream_runs(const struct TbStream *stream);

// Samples accepted so far.
//
// # Safety
// `stream` must be null or live.
uint64_t tb_stream_len(const struct TbStream *stream);

#endif  /* TRENDBAND_H */
