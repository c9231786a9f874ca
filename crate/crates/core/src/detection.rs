//! Residual bounds, candidate outliers and the false-alert (FAS) filter.
//!
//! Residuals against the trend replica are bucketed with the same plan as the
//! series. Each bucket gets a bound that blends its own standard deviation
//! with the global one, `alpha * sd_local + (1 - alpha) * sd_global`, and a
//! point is a candidate when it sits more than `bound_multiplier` bounds from
//! its bucket mean.
//!
//! The same bounds computed on the raw signal give the FAS score
//! `log10(signal_bound / residual_bound)` per bucket. A high score means the
//! residual wiggle is small compared to the signal itself, so candidates in
//! such buckets are dropped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::periodicity::detect_periodicity;
use crate::series::{DetectorConfig, TimeSeries};
use crate::trend::{build_trend, plan_buckets, BucketPlan, TrendReplica};

/// FAS value reported for a bucket whose residuals have no spread.
pub const FAS_SENTINEL: f64 = f64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub mean: f64,
    pub sd_local: f64,
    pub bound: f64,
}

/// Per-bucket bands plus the global deviation they were blended with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSet {
    pub per_bucket: Vec<Band>,
    pub sd_global: f64,
    pub alpha_used: f64,
}

/// Everything one detection pass produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyReport {
    /// Indices beyond the residual bounds, ascending.
    pub candidates: Vec<usize>,
    /// Candidates that survived the FAS filter, ascending.
    pub anomalies: Vec<usize>,
    pub fas_per_bucket: Vec<f64>,
    pub residual_bands: BandSet,
    pub signal_bands: BandSet,
    pub period_used: Option<usize>,
    pub plan_used: BucketPlan,
}

impl AnomalyReport {
    pub fn is_anomaly(&self, index: usize) -> bool {
        self.anomalies.binary_search(&index).is_ok()
    }
}

/// Population mean and standard deviation.
fn mean_sd(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn residuals(series: &TimeSeries, trend: &TrendReplica) -> Result<Vec<f64>> {
    if series.len() != trend.values.len() {
        return Err(Error::LengthMismatch { expected: series.len(), actual: trend.values.len() });
    }
    Ok(series.values().iter().zip(&trend.values).map(|(y, t)| y - t).collect())
}

pub fn band_set(values: &[f64], plan: &BucketPlan, alpha: f64) -> Result<BandSet> {
    if values.len() != plan.series_length() {
        return Err(Error::LengthMismatch { expected: plan.series_length(), actual: values.len() });
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidConfig(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let (_, sd_global) = mean_sd(values);
    let per_bucket = plan
        .buckets()
        .iter()
        .map(|b| {
            let (mean, sd_local) = mean_sd(&values[b.range()]);
            Band { mean, sd_local, bound: alpha * sd_local + (1.0 - alpha) * sd_global }
        })
        .collect();
    Ok(BandSet { per_bucket, sd_global, alpha_used: alpha })
}

/// Indices strictly more than `multiplier * bound` away from their bucket mean.
pub fn candidate_outliers(values: &[f64], bands: &BandSet, plan: &BucketPlan, multiplier: f64) -> Vec<usize> {
    plan.buckets()
        .iter()
        .zip(&bands.per_bucket)
        .flat_map(|(b, band)| b.range().filter(move |&i| (values[i] - band.mean).abs() > multiplier * band.bound))
        .collect()
}

pub fn fas_values(signal: &BandSet, residual: &BandSet, sd_epsilon: f64) -> Vec<f64> {
    signal
        .per_bucket
        .iter()
        .zip(&residual.per_bucket)
        .map(|(s, r)| match (s.bound < sd_epsilon, r.bound < sd_epsilon) {
            (true, true) => 0.0,
            (false, true) => FAS_SENTINEL,
            _ => (s.bound / r.bound).log10(),
        })
        .collect()
}

/// Keeps candidates whose bucket scores at or below `threshold`.
pub fn apply_fas_filter(candidates: &[usize], plan: &BucketPlan, fas: &[f64], threshold: f64) -> Vec<usize> {
    candidates
        .iter()
        .copied()
        .filter(|&i| plan.bucket_of(i).and_then(|b| fas.get(b)).is_some_and(|&f| f <= threshold))
        .collect()
}

/// Runs the whole pipeline on `series`, detecting its period first.
///
/// `optimized` selects the fixed-fraction quadratic bucketing for aperiodic
/// data instead of short linear buckets.
pub fn detect_offline(series: &TimeSeries, config: &DetectorConfig, optimized: bool) -> Result<AnomalyReport> {
    config.validate()?;
    let period = detect_periodicity(series, config);
    detect_with_period(series, config, optimized, period)
}

/// Runs the pipeline with a caller-chosen period (`None` means aperiodic).
pub fn detect_with_period(
    series: &TimeSeries,
    config: &DetectorConfig,
    optimized: bool,
    period: Option<usize>,
) -> Result<AnomalyReport> {
    config.validate()?;
    let n = series.len();
    if n < 3 {
        return Err(Error::SeriesTooShort { len: n, required: 3 });
    }
    let plan = plan_buckets(n, period, optimized, config)?;
    let trend = build_trend(series, &plan)?;
    let resid = residuals(series, &trend)?;
    let residual_bands = band_set(&resid, &plan, config.alpha)?;
    let candidates = candidate_outliers(&resid, &residual_bands, &plan, config.bound_multiplier);
    let signal_bands = band_set(series.values(), &plan, config.alpha)?;
    let fas_per_bucket = fas_values(&signal_bands, &residual_bands, config.sd_epsilon);
    let anomalies = apply_fas_filter(&candidates, &plan, &fas_per_bucket, config.fas_threshold);
    Ok(AnomalyReport {
        candidates,
        anomalies,
        fas_per_bucket,
        residual_bands,
        signal_bands,
        period_used: period,
        plan_used: plan,
    })
}
