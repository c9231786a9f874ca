//! C interface to `trendband`.
//!
//! Objects are opaque handles created by `*_new` / returned through out
//! pointers and released with the matching `*_free`. Every fallible call
//! returns a [`TbStatus`]; out parameters are written only on `TB_OK`.
//! Panics never cross the boundary and surface as `TB_INTERNAL`.
//!
//! Array getters follow one convention: they copy up to `capacity` items into
//! `out` (which may be null when `capacity` is 0) and return the total count.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use trendband::{
    detect_offline, detect_periodicity, AnomalyReport, DetectorConfig, Error, StreamDecision, StreamState, TimeSeries,
};

/// Result code of every fallible call.
#[repr(C)]
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TbStatus {
    TB_OK = 0,
    TB_NULL_POINTER = 1,
    TB_INVALID_ARGUMENT = 2,
    TB_NON_FINITE_SAMPLE = 3,
    TB_SERIES_TOO_SHORT = 4,
    TB_DEGENERATE_SERIES = 5,
    TB_NUMERICAL = 6,
    TB_INTERNAL = 99,
}

impl From<&Error> for TbStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NonFiniteSample { .. } => TbStatus::TB_NON_FINITE_SAMPLE,
            Error::DegenerateSeries => TbStatus::TB_DEGENERATE_SERIES,
            Error::SeriesTooShort { .. } => TbStatus::TB_SERIES_TOO_SHORT,
            Error::RankDeficient => TbStatus::TB_NUMERICAL,
            Error::LagOutOfRange { .. }
            | Error::LengthMismatch { .. }
            | Error::InvalidConfig(_)
            | Error::InvalidArgument(_) => TbStatus::TB_INVALID_ARGUMENT,
        }
    }
}

/// Detector settings. Starts from the library defaults.
pub struct TbConfig {
    inner: DetectorConfig,
}

/// Result of one offline detection pass. Immutable.
pub struct TbReport {
    inner: AnomalyReport,
}

/// Online detector state for one series. Not thread-safe; serialize pushes.
pub struct TbStream {
    state: StreamState,
    config: DetectorConfig,
}

fn guard(f: impl FnOnce() -> TbStatus) -> TbStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(TbStatus::TB_INTERNAL)
}

fn guard_or<T>(fallback: T, f: impl FnOnce() -> T) -> T {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(fallback)
}

unsafe fn config_or_default(config: *const TbConfig) -> DetectorConfig {
    config.as_ref().map_or_else(DetectorConfig::default, |c| c.inner.clone())
}

unsafe fn series_from(values: *const f64, len: usize) -> Result<TimeSeries, TbStatus> {
    if values.is_null() && len > 0 {
        return Err(TbStatus::TB_NULL_POINTER);
    }
    let raw = if len == 0 { &[][..] } else { slice::from_raw_parts(values, len) };
    TimeSeries::new(raw.to_vec()).map_err(|e| TbStatus::from(&e))
}

unsafe fn copy_out<T: Copy>(items: &[T], out: *mut T, capacity: usize) -> usize {
    if !out.is_null() {
        let n = items.len().min(capacity);
        ptr::copy_nonoverlapping(items.as_ptr(), out, n);
    }
    items.len()
}

/// Static, NUL-terminated description of `status`.
#[no_mangle]
pub extern "C" fn tb_status_message(status: TbStatus) -> *const c_char {
    let msg: &'static CStr = match status {
        TbStatus::TB_OK => c"ok",
        TbStatus::TB_NULL_POINTER => c"required pointer argument was null",
        TbStatus::TB_INVALID_ARGUMENT => c"invalid argument or configuration",
        TbStatus::TB_NON_FINITE_SAMPLE => c"sample is NaN or infinite",
        TbStatus::TB_SERIES_TOO_SHORT => c"series too short",
        TbStatus::TB_DEGENERATE_SERIES => c"series has zero variance",
        TbStatus::TB_NUMERICAL => c"numerically singular fit",
        TbStatus::TB_INTERNAL => c"internal error",
    };
    msg.as_ptr()
}

/// Library version, NUL-terminated.
#[no_mangle]
pub extern "C" fn tb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// New configuration with default settings. Release with `tb_config_free`.
#[no_mangle]
pub extern "C" fn tb_config_new() -> *mut TbConfig {
    guard_or(ptr::null_mut(), || Box::into_raw(Box::new(TbConfig { inner: DetectorConfig::default() })))
}

/// # Safety
/// `config` must be null or a handle from `tb_config_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tb_config_free(config: *mut TbConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

unsafe fn set_field(config: *mut TbConfig, apply: impl FnOnce(&mut DetectorConfig)) -> TbStatus {
    guard(|| {
        let Some(c) = config.as_mut() else {
            return TbStatus::TB_NULL_POINTER;
        };
        let mut next = c.inner.clone();
        apply(&mut next);
        match next.validate() {
            Ok(()) => {
                c.inner = next;
                TbStatus::TB_OK
            }
            Err(e) => TbStatus::from(&e),
        }
    })
}

/// Weight of the per-bucket deviation in the bounds, in [0, 1].
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_config_set_alpha(config: *mut TbConfig, alpha: f64) -> TbStatus {
    set_field(config, |c| c.alpha = alpha)
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_config_set_fas_threshold(config: *mut TbConfig, threshold: f64) -> TbStatus {
    set_field(config, |c| c.fas_threshold = threshold)
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tb_config_set_bound_multiplier(config: *mut TbConfig, multiplier: f64) -> TbStatus {
    set_field(config, |c| c.bound_multiplier = multiplier)
}

/// Runs offline detection on `values[0..len]`. `config` may be null for
/// defaults. On success `*out` receives a report to release with
/// `tb_report_free`.
///
/// # Safety
/// `values` must point to `len` readable doubles; `config` must be null or
/// live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_detect_offline(
    config: *const TbConfig,
    values: *const f64,
    len: usize,
    optimized: bool,
    out: *mut *mut TbReport,
) -> TbStatus {
    guard(|| {
        if out.is_null() {
            return TbStatus::TB_NULL_POINTER;
        }
        let cfg = config_or_default(config);
        let series = match series_from(values, len) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match detect_offline(&series, &cfg, optimized) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(TbReport { inner: report }));
                TbStatus::TB_OK
            }
            Err(e) => TbStatus::from(&e),
        }
    })
}

/// Dominant period of `values[0..len]`; writes 0 when none is found.
///
/// # Safety
/// As for `tb_detect_offline`; `period` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_detect_periodicity(
    config: *const TbConfig,
    values: *const f64,
    len: usize,
    period: *mut usize,
) -> TbStatus {
    guard(|| {
        if period.is_null() {
            return TbStatus::TB_NULL_POINTER;
        }
        let cfg = config_or_default(config);
        match series_from(values, len) {
            Ok(s) => {
                *period = detect_periodicity(&s, &cfg).unwrap_or(0);
                TbStatus::TB_OK
            }
            Err(status) => status,
        }
    })
}

/// # Safety
/// `report` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn tb_report_free(report: *mut TbReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Anomaly indices, ascending.
///
/// # Safety
/// `report` must be live; `out` must hold `capacity` elements or be null.
#[no_mangle]
pub unsafe extern "C" fn tb_report_anomalies(report: *const TbReport, out: *mut usize, capacity: usize) -> usize {
    guard_or(0, || report.as_ref().map_or(0, |r| copy_out(&r.inner.anomalies, out, capacity)))
}

/// Indices beyond the residual bounds before the FAS filter, ascending.
///
/// # Safety
/// As for `tb_report_anomalies`.
#[no_mangle]
pub unsafe extern "C" fn tb_report_candidates(report: *const TbReport, out: *mut usize, capacity: usize) -> usize {
    guard_or(0, || report.as_ref().map_or(0, |r| copy_out(&r.inner.candidates, out, capacity)))
}

/// FAS score per bucket.
///
/// # Safety
/// As for `tb_report_anomalies`.
#[no_mangle]
pub unsafe extern "C" fn tb_report_fas(report: *const TbReport, out: *mut f64, capacity: usize) -> usize {
    guard_or(0, || report.as_ref().map_or(0, |r| copy_out(&r.inner.fas_per_bucket, out, capacity)))
}

/// Bucket boundaries as `[start0, end0, start1, end1, ...]`; returns the
/// number of buckets, so `out` needs `2 * count` slots.
///
/// # Safety
/// `report` must be live; `out` must hold `capacity` elements or be null.
#[no_mangle]
pub unsafe extern "C" fn tb_report_buckets(report: *const TbReport, out: *mut usize, capacity: usize) -> usize {
    guard_or(0, || {
        report.as_ref().map_or(0, |r| {
            let flat: Vec<usize> = r.inner.plan_used.buckets().iter().flat_map(|b| [b.start, b.end]).collect();
            copy_out(&flat, out, capacity) / 2
        })
    })
}

/// Period used by the pass, 0 when the series was treated as aperiodic.
///
/// # Safety
/// `report` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn tb_report_period(report: *const TbReport) -> usize {
    guard_or(0, || report.as_ref().and_then(|r| r.inner.period_used).unwrap_or(0))
}

/// New online detector; `config` (may be null) is copied.
/// Release with `tb_stream_free`.
///
/// # Safety
/// `config` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn tb_stream_new(config: *const TbConfig) -> *mut TbStream {
    guard_or(ptr::null_mut(), || {
        Box::into_raw(Box::new(TbStream { state: StreamState::new(), config: config_or_default(config) }))
    })
}

/// # Safety
/// `stream` must be null or a live stream handle.
#[no_mangle]
pub unsafe extern "C" fn tb_stream_free(stream: *mut TbStream) {
    if !stream.is_null() {
        drop(Box::from_raw(stream));
    }
}

/// Appends one sample. `*ran` tells whether detection was re-run and
/// `*is_anomaly` whether the new sample was flagged. Either out pointer may
/// be null.
///
/// # Safety
/// `stream` must be live and not used concurrently.
#[no_mangle]
pub unsafe extern "C" fn tb_stream_push(
    stream: *mut TbStream,
    sample: f64,
    ran: *mut bool,
    is_anomaly: *mut bool,
) -> TbStatus {
    guard(|| {
        let Some(s) = stream.as_mut() else {
            return TbStatus::TB_NULL_POINTER;
        };
        match s.state.push(sample, &s.config) {
            Ok(decision) => {
                if let Some(r) = ran.as_mut() {
                    *r = decision.ran();
                }
                if let Some(a) = is_anomaly.as_mut() {
                    *a = matches!(decision, StreamDecision::Ran { newest_is_anomaly: true });
                }
                TbStatus::TB_OK
            }
            Err(e) => TbStatus::from(&e),
        }
    })
}

/// Number of full detection runs so far.
///
/// # Safety
/// `stream` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn tb_stream_runs(stream: *const TbStream) -> u64 {
    guard_or(0, || stream.as_ref().map_or(0, |s| s.state.runs_executed()))
}

/// Samples accepted so far.
///
/// # Safety
/// `stream` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn tb_stream_len(stream: *const TbStream) -> u64 {
    guard_or(0, || stream.as_ref().map_or(0, |s| s.state.samples_seen()))
}
