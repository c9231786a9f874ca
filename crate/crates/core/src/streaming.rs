//! Online detection with run skipping.
//!
//! Each arriving sample is appended to a growing buffer. Full detection is
//! re-run only when the sample leaves the signal band of the final bucket
//! from the previous run; samples inside that band cannot be outliers of the
//! signal and are reported as normal without re-running.

use serde::{Deserialize, Serialize};

use crate::detection::{detect_with_period, AnomalyReport};
use crate::error::{Error, Result};
use crate::periodicity::{detect_periodicity, PeriodCache};
use crate::series::{DetectorConfig, TimeSeries};

/// Signal band of the last bucket of the most recent run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalBand {
    pub mean: f64,
    pub bound: f64,
}

impl SignalBand {
    pub fn is_violated_by(&self, sample: f64, multiplier: f64) -> bool {
        (sample - self.mean).abs() > multiplier * self.bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StreamDecision {
    /// Detection was not re-run; the sample is treated as normal.
    Skipped,
    Ran {
        newest_is_anomaly: bool,
    },
}

impl StreamDecision {
    pub fn is_anomaly(&self) -> bool {
        matches!(self, StreamDecision::Ran { newest_is_anomaly: true })
    }

    pub fn ran(&self) -> bool {
        matches!(self, StreamDecision::Ran { .. })
    }
}

/// Per-series online state. Single writer.
#[derive(Debug, Clone, Default)]
pub struct StreamState {
    buffer: TimeSeries,
    period_cache: PeriodCache,
    last_signal_band: Option<SignalBand>,
    runs_executed: u64,
    samples_seen: u64,
    last_report: Option<AnomalyReport>,
    pinned_period: Option<Option<usize>>,
}

impl StreamState {
    pub fn new() -> Self {
        Self::default()
    }

    /// A state that never runs period detection and always uses `period`
    /// (`None` forces aperiodic buckets).
    pub fn with_period(period: Option<usize>) -> Self {
        Self { pinned_period: Some(period), ..Self::default() }
    }

    pub fn buffer(&self) -> &TimeSeries {
        &self.buffer
    }

    pub fn period_cache(&self) -> &PeriodCache {
        &self.period_cache
    }

    pub fn last_signal_band(&self) -> Option<SignalBand> {
        self.last_signal_band
    }

    pub fn runs_executed(&self) -> u64 {
        self.runs_executed
    }

    pub fn samples_seen(&self) -> u64 {
        self.samples_seen
    }

    pub fn last_report(&self) -> Option<&AnomalyReport> {
        self.last_report.as_ref()
    }

    /// Whether `sample` calls for a fresh run: always before the first run,
    /// afterwards only when it leaves the last signal band.
    pub fn should_run(&self, sample: f64, config: &DetectorConfig) -> bool {
        match self.last_signal_band {
            None => true,
            Some(band) => band.is_violated_by(sample, config.bound_multiplier),
        }
    }

    pub fn push(&mut self, sample: f64, config: &DetectorConfig) -> Result<StreamDecision> {
        if !sample.is_finite() {
            return Err(Error::NonFiniteSample { index: self.buffer.len() });
        }
        let triggered = !config.skip_runs || self.should_run(sample, config);
        self.buffer.push(sample)?;
        self.samples_seen += 1;
        if self.buffer.len() < config.min_detect_length || !triggered {
            return Ok(StreamDecision::Skipped);
        }

        let n = self.buffer.len();
        let period = match self.pinned_period {
            Some(pinned) => pinned,
            None => {
                self.period_cache = self.period_cache.update(detect_periodicity(&self.buffer, config));
                self.period_cache.confirmed_period
            }
        };
        let period = period.filter(|&p| p < n);
        let report = detect_with_period(&self.buffer, config, true, period)?;

        let last = report.signal_bands.per_bucket.last().expect("non-empty plan");
        self.last_signal_band = Some(SignalBand { mean: last.mean, bound: last.bound });
        self.runs_executed += 1;
        let newest_is_anomaly = report.is_anomaly(n - 1);
        self.last_report = Some(report);
        Ok(StreamDecision::Ran { newest_is_anomaly })
    }
}

/// Result of feeding a whole series through a fresh [`StreamState`].
#[derive(Debug, Clone)]
pub struct Replay {
    pub decisions: Vec<StreamDecision>,
    /// Signal band in force just before each push, for auditing skips.
    pub bands_before: Vec<Option<SignalBand>>,
    pub state: StreamState,
}

impl Replay {
    pub fn runs_executed(&self) -> u64 {
        self.state.runs_executed
    }

    /// Indices whose arrival was reported anomalous.
    pub fn anomalies(&self) -> Vec<usize> {
        self.decisions.iter().enumerate().filter(|(_, d)| d.is_anomaly()).map(|(i, _)| i).collect()
    }

    /// Skipped samples past warm-up that nevertheless violated the band in
    /// force. Empty whenever run skipping behaves as designed.
    pub fn unsafe_skips(&self, config: &DetectorConfig) -> Vec<usize> {
        let values = self.state.buffer.values();
        self.decisions
            .iter()
            .zip(&self.bands_before)
            .enumerate()
            .filter(|(i, (d, band))| {
                !d.ran()
                    && i + 1 >= config.min_detect_length
                    && band.is_some_and(|b| b.is_violated_by(values[*i], config.bound_multiplier))
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// Streams `series` sample by sample. `optimize` overrides `config.skip_runs`.
pub fn replay(series: &TimeSeries, config: &DetectorConfig, optimize: bool) -> Result<Replay> {
    replay_from(StreamState::new(), series, config, optimize)
}

/// Like [`replay`], starting from a caller-built state such as
/// [`StreamState::with_period`].
pub fn replay_from(
    mut state: StreamState,
    series: &TimeSeries,
    config: &DetectorConfig,
    optimize: bool,
) -> Result<Replay> {
    let config = DetectorConfig { skip_runs: optimize, ..config.clone() };
    config.validate()?;
    let mut decisions = Vec::with_capacity(series.len());
    let mut bands_before = Vec::with_capacity(series.len());
    for &sample in series.values() {
        bands_before.push(state.last_signal_band);
        decisions.push(state.push(sample, &config)?);
    }
    Ok(Replay { decisions, bands_before, state })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> DetectorConfig {
        DetectorConfig::default()
    }

    #[test]
    fn fresh_state_always_runs() {
        assert!(StreamState::new().should_run(123.0, &cfg()));
    }

    #[test]
    fn trigger_compares_against_twice_the_bound() {
        let state = StreamState { last_signal_band: Some(SignalBand { mean: 0.0, bound: 1.0 }), ..Default::default() };
        assert!(!state.should_run(1.5, &cfg()));
        assert!(!state.should_run(-2.0, &cfg()));
        assert!(state.should_run(2.5, &cfg()));
        assert!(state.should_run(-2.5, &cfg()));
    }

    #[test]
    fn constant_series_runs_once() {
        let s = TimeSeries::new(vec![4.0; 100]).unwrap();
        let r = replay(&s, &cfg(), true).unwrap();
        assert_eq!(r.runs_executed(), 1);
        assert!(r.decisions[19].ran());
        assert!(r.decisions[20..].iter().all(|d| *d == StreamDecision::Skipped));
        assert!(r.anomalies().is_empty());
    }

    #[test]
    fn short_series_never_runs() {
        let s = TimeSeries::new(vec![1.0, 5.0, -3.0, 2.0, 8.0]).unwrap();
        for optimize in [true, false] {
            let r = replay(&s, &cfg(), optimize).unwrap();
            assert_eq!(r.runs_executed(), 0);
            assert!(r.anomalies().is_empty());
        }
    }

    #[test]
    fn skipped_push_grows_buffer_by_one() {
        let mut state = StreamState::new();
        let c = cfg();
        for i in 0..30 {
            state.push((i % 3) as f64, &c).unwrap();
        }
        let band = state.last_signal_band().unwrap();
        let before = state.buffer().len();
        let runs = state.runs_executed();
        assert!(!state.should_run(band.mean, &c));
        assert_eq!(state.push(band.mean, &c).unwrap(), StreamDecision::Skipped);
        assert_eq!(state.buffer().len(), before + 1);
        assert_eq!(state.runs_executed(), runs);
        assert_eq!(state.samples_seen(), 31);
    }

    #[test]
    fn unoptimized_runs_every_push_after_warmup() {
        let y: Vec<f64> = (0..60).map(|i| ((i * 13) % 7) as f64).collect();
        let r = replay(&TimeSeries::new(y.clone()).unwrap(), &cfg(), false).unwrap();
        assert_eq!(r.runs_executed(), 41);
        assert_eq!(r.state.buffer().values(), &y[..]);
        assert!(r.state.last_report().is_some());
    }

    #[test]
    fn pinned_period_skips_detection() {
        let y: Vec<f64> = (0..120).map(|i| (i as f64 * std::f64::consts::TAU / 12.0).sin()).collect();
        let s = TimeSeries::new(y).unwrap();
        let free = replay(&s, &cfg(), false).unwrap();
        assert_eq!(free.state.last_report().unwrap().period_used, Some(12));
        let pinned = replay_from(StreamState::with_period(None), &s, &cfg(), false).unwrap();
        assert_eq!(pinned.state.last_report().unwrap().period_used, None);
        assert_eq!(pinned.state.period_cache(), &PeriodCache::default());
    }

    #[test]
    fn replays_are_deterministic() {
        let y: Vec<f64> = (0..150).map(|i| ((i * 37) % 11) as f64 + if i == 90 { 40.0 } else { 0.0 }).collect();
        let s = TimeSeries::new(y).unwrap();
        for optimize in [true, false] {
            let a = replay(&s, &cfg(), optimize).unwrap();
            let b = replay(&s, &cfg(), optimize).unwrap();
            assert_eq!(a.decisions, b.decisions);
            assert_eq!(a.state.last_report(), b.state.last_report());
        }
    }

    #[test]
    fn breakout_replay_skips_most_runs() {
        use crate::evalgen::{gen_breakout, BreakoutSpec};
        let s = gen_breakout(&BreakoutSpec::default()).unwrap().series;
        let on = replay(&s, &cfg(), true).unwrap();
        let off = replay(&s, &cfg(), false).unwrap();
        assert_eq!(off.runs_executed(), 481);
        assert!(on.runs_executed() < 500);
        assert!(on.anomalies().iter().any(|i| i.abs_diff(250) <= 1));
        assert!(off.anomalies().iter().any(|i| i.abs_diff(250) <= 1));
        assert!(on.anomalies().iter().all(|&i| on.decisions[i].ran()));
        assert!(on.unsafe_skips(&cfg()).is_empty());
    }

    #[test]
    fn rejects_non_finite_samples() {
        let mut state = StreamState::new();
        assert_eq!(state.push(f64::NAN, &cfg()), Err(Error::NonFiniteSample { index: 0 }));
        assert_eq!(state.samples_seen(), 0);
    }
}
