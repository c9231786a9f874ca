//! The JSON document written by `trendband detect`.
//!
//! Schema version 1. Top-level keys:
//!
//! | key | type | notes |
//! |-----|------|-------|
//! | `schema_version` | integer | currently 1 |
//! | `series_length` | integer | |
//! | `origin_index` | integer | index of the first sample |
//! | `mode` | `"offline"` or `"online"` | |
//! | `optimized` | bool | offline: fraction-based buckets; online: run skipping |
//! | `period` | integer or null | period of the final detection pass |
//! | `config` | object | the [`DetectorConfig`] used |
//! | `anomalies` | integer array | positions (0-based, not shifted by origin) |
//! | `candidates` | integer array | offline only, empty online |
//! | `buckets` | array | per bucket: `start`, `end`, `degree`, `fas`, `residual_bound`, `signal_bound` |
//! | `residual_sd_global`, `signal_sd_global` | number | |
//! | `runs_executed` | integer or null | online only |
//! | `pushes` | integer or null | online only |
//! | `wall_time_ms` | number | excluded from determinism checks |
//!
//! In online mode `buckets` and the global deviations describe the last run.

use serde::{Deserialize, Serialize};

use crate::detection::AnomalyReport;
use crate::series::DetectorConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Offline,
    Online,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketSummary {
    pub start: usize,
    pub end: usize,
    pub degree: usize,
    pub fas: f64,
    pub residual_bound: f64,
    pub signal_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputReport {
    pub schema_version: u32,
    pub series_length: usize,
    pub origin_index: i64,
    pub mode: Mode,
    pub optimized: bool,
    pub period: Option<usize>,
    pub config: DetectorConfig,
    pub anomalies: Vec<usize>,
    pub candidates: Vec<usize>,
    pub buckets: Vec<BucketSummary>,
    pub residual_sd_global: f64,
    pub signal_sd_global: f64,
    pub runs_executed: Option<u64>,
    pub pushes: Option<u64>,
    pub wall_time_ms: f64,
}

impl OutputReport {
    /// Fills the bucket-level fields from `report`; the caller sets the rest.
    pub fn from_anomaly_report(
        report: &AnomalyReport,
        series_length: usize,
        origin_index: i64,
        mode: Mode,
        optimized: bool,
        config: &DetectorConfig,
    ) -> Self {
        let buckets = report
            .plan_used
            .buckets()
            .iter()
            .enumerate()
            .map(|(b, bucket)| BucketSummary {
                start: bucket.start,
                end: bucket.end,
                degree: bucket.degree,
                fas: report.fas_per_bucket[b],
                residual_bound: report.residual_bands.per_bucket[b].bound,
                signal_bound: report.signal_bands.per_bucket[b].bound,
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            series_length,
            origin_index,
            mode,
            optimized,
            period: report.period_used,
            config: config.clone(),
            anomalies: report.anomalies.clone(),
            candidates: report.candidates.clone(),
            buckets,
            residual_sd_global: report.residual_bands.sd_global,
            signal_sd_global: report.signal_bands.sd_global,
            runs_executed: None,
            pushes: None,
            wall_time_ms: 0.0,
        }
    }

    /// Report for a stream that never reached a detection run.
    pub fn empty(
        series_length: usize,
        origin_index: i64,
        mode: Mode,
        optimized: bool,
        config: &DetectorConfig,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            series_length,
            origin_index,
            mode,
            optimized,
            period: None,
            config: config.clone(),
            anomalies: Vec::new(),
            candidates: Vec::new(),
            buckets: Vec::new(),
            residual_sd_global: 0.0,
            signal_sd_global: 0.0,
            runs_executed: None,
            pushes: None,
            wall_time_ms: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
