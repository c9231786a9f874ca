//! Shared domain types: the validated series and the detector configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniformly indexed sequence of finite samples.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    origin_index: i64,
}

impl TimeSeries {
    /// Wraps `values`, rejecting the first non-finite sample.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Self { values, origin_index: 0 })
    }

    pub fn with_origin(mut self, origin_index: i64) -> Self {
        self.origin_index = origin_index;
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn origin_index(&self) -> i64 {
        self.origin_index
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Appends one sample. Used by the streaming buffer.
    pub(crate) fn push(&mut self, sample: f64) -> Result<()> {
        if !sample.is_finite() {
            return Err(Error::NonFiniteSample { index: self.values.len() });
        }
        self.values.push(sample);
        Ok(())
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Validates a raw sample slice into a [`TimeSeries`].
pub fn validate_series(raw: &[f64]) -> Result<TimeSeries> {
    TimeSeries::new(raw.to_vec())
}

/// Every tunable of the detector.
///
/// The defaults are the values the method was published with: equal weight
/// on local and global dispersion (`alpha = 0.5`), a FAS threshold of 1 and
/// outlier bounds at twice the blended deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorConfig {
    /// Weight of the local (per-bucket) deviation in the blended bound.
    pub alpha: f64,
    /// Buckets whose FAS value exceeds this have their candidates dropped.
    pub fas_threshold: f64,
    /// Outliers lie beyond `bound_multiplier * bound` from the bucket mean.
    pub bound_multiplier: f64,
    /// Window used when no periodicity is found (non-optimized mode).
    pub aperiodic_window: usize,
    /// Window as a fraction of the series length in optimized aperiodic mode.
    pub optimized_window_fraction: f64,
    pub optimized_degree: usize,
    /// Points per polynomial degree in periodic mode.
    pub degree_step: usize,
    pub max_degree: usize,
    /// Periodicity detection and streaming runs need at least this many samples.
    pub min_detect_length: usize,
    pub sd_epsilon: f64,
    pub psd_peak_count: usize,
    /// Longest admissible period as a fraction of the series length.
    pub acf_confidence_fraction: f64,
    /// False-alarm probability for a periodogram peak to count as a
    /// candidate. `None` keeps every local maximum.
    pub psd_false_alarm: Option<f64>,
    /// Streaming only: re-run detection only when a sample leaves the last
    /// signal band. When false every push past `min_detect_length` runs.
    pub skip_runs: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            fas_threshold: 1.0,
            bound_multiplier: 2.0,
            aperiodic_window: 10,
            optimized_window_fraction: 0.10,
            optimized_degree: 2,
            degree_step: 5,
            max_degree: 8,
            min_detect_length: 20,
            sd_epsilon: 1e-12,
            psd_peak_count: 5,
            acf_confidence_fraction: 1.0 / 3.0,
            psd_false_alarm: Some(0.01),
            skip_runs: true,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        fn bad(msg: impl Into<String>) -> Result<()> {
            Err(Error::InvalidConfig(msg.into()))
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha must lie in [0, 1], got {}", self.alpha));
        }
        if !self.fas_threshold.is_finite() && self.fas_threshold != f64::INFINITY {
            return bad("fas_threshold must be a number");
        }
        if !(self.bound_multiplier > 0.0 && self.bound_multiplier.is_finite()) {
            return bad(format!("bound_multiplier must be positive, got {}", self.bound_multiplier));
        }
        if !(self.optimized_window_fraction > 0.0 && self.optimized_window_fraction <= 1.0) {
            return bad("optimized_window_fraction must lie in (0, 1]");
        }
        if !(self.acf_confidence_fraction > 0.0 && self.acf_confidence_fraction < 1.0) {
            return bad("acf_confidence_fraction must lie in (0, 1)");
        }
        if self.aperiodic_window < 2 {
            return bad("aperiodic_window must be at least 2");
        }
        if self.degree_step == 0 || self.max_degree == 0 || self.optimized_degree == 0 {
            return bad("degree_step, max_degree and optimized_degree must be positive");
        }
        if self.min_detect_length == 0 || self.psd_peak_count == 0 {
            return bad("min_detect_length and psd_peak_count must be positive");
        }
        if !(self.sd_epsilon > 0.0 && self.sd_epsilon.is_finite()) {
            return bad("sd_epsilon must be a small positive number");
        }
        if let Some(p) = self.psd_false_alarm {
            if !(p > 0.0 && p < 1.0) {
                return bad("psd_false_alarm must lie in (0, 1)");
            }
        }
        Ok(())
    }

    /// Default configuration with the given blend weight and FAS threshold.
    pub fn new(alpha: f64, fas_threshold: f64) -> Result<Self> {
        let cfg = Self { alpha, fas_threshold, ..Self::default() };
        cfg.validate()?;
        Ok(cfg)
    }
}
