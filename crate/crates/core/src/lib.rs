//! Anomaly detection for univariate time series by bucketed local
//! polynomial fits.
//!
//! The pipeline: detect the dominant period, cut the series into buckets one
//! period long (or fixed-size buckets when aperiodic), fit a polynomial per
//! bucket, smooth the joins into a trend replica, and flag residuals outside
//! an adaptive per-bucket band. A false-alert filter then drops flags in
//! buckets where the residual spread is negligible next to the signal.
//!
//! [`detect_offline`] runs the pipeline once over a whole series.
//! [`StreamState`] runs it online and skips re-runs while new samples stay
//! inside the last signal band.

pub mod cli;
pub mod detection;
pub mod error;
pub mod evalgen;
pub mod io;
pub mod periodicity;
pub mod report;
pub mod series;
pub mod streaming;
pub mod trend;

pub use detection::{
    apply_fas_filter, band_set, candidate_outliers, detect_offline, detect_with_period, fas_values, residuals,
    AnomalyReport, Band, BandSet,
};
pub use error::{Error, Result};
pub use evalgen::{
    confusion, f1, gen_breakout, gen_hetero_sine, BreakoutSpec, ConfusionCounts, HeteroSineSpec, LabeledSeries,
};
pub use periodicity::{
    autocorrelation, candidate_periods, detect_periodicity, power_spectral_density, update_period_cache,
    validate_period, PeriodCache, PeriodCandidate, Spectrum,
};
pub use series::{validate_series, DetectorConfig, TimeSeries};
pub use streaming::{replay, replay_from, Replay, SignalBand, StreamDecision, StreamState};
pub use trend::{
    build_trend, degree_for_window, fit_polynomial, plan_buckets, Bucket, BucketPlan, PolyFit, TrendReplica,
};
