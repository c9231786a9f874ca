//! Dominant-period detection.
//!
//! A lag is accepted as a period only when two independent views agree: the
//! periodogram has a peak at the matching frequency bin and the
//! autocorrelation has a positive local maximum at that lag. Peaks implying
//! fewer than `1 / acf_confidence_fraction` observed cycles are discarded,
//! since short series produce spurious hills at the tail of the ACF. When
//! several lags validate, the smallest one wins.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{DetectorConfig, TimeSeries};

/// Periodogram of a mean-removed series, DC excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    series_len: usize,
    /// `powers[k - 1]` is the power at frequency bin `k`, for `k` in `1..=n/2`.
    powers: Vec<f64>,
}

impl Spectrum {
    /// Builds a spectrum from explicit powers for bins `1..=powers.len()`.
    pub fn from_powers(series_len: usize, powers: Vec<f64>) -> Self {
        Self { series_len, powers }
    }

    pub fn series_len(&self) -> usize {
        self.series_len
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    /// Power at bin `k` (1-based).
    pub fn power(&self, bin: usize) -> Option<f64> {
        bin.checked_sub(1).and_then(|i| self.powers.get(i).copied())
    }

    /// `(bin, power)` pairs in ascending bin order.
    pub fn bins(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.powers.iter().enumerate().map(|(i, &p)| (i + 1, p))
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }
}

/// A lag that passed the periodogram stage, with the evidence behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodCandidate {
    pub lag: usize,
    pub psd_power: f64,
    pub acf_value: f64,
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Biased sample autocorrelation `r[0..=max_lag]`, normalized so `r[0] = 1`.
pub fn autocorrelation(series: &TimeSeries, max_lag: usize, sd_epsilon: f64) -> Result<Vec<f64>> {
    let x = series.values();
    let n = x.len();
    if n < 2 {
        return Err(Error::SeriesTooShort { len: n, required: 2 });
    }
    if max_lag == 0 || max_lag >= n {
        return Err(Error::LagOutOfRange { lag: max_lag, max: n - 1 });
    }
    let m = mean(x);
    let centered: Vec<f64> = x.iter().map(|v| v - m).collect();
    let c0 = centered.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if c0 <= sd_epsilon * sd_epsilon {
        return Err(Error::DegenerateSeries);
    }
    let acf = (0..=max_lag)
        .map(|k| {
            let ck: f64 = centered[..n - k].iter().zip(&centered[k..]).map(|(a, b)| a * b).sum();
            ck / n as f64 / c0
        })
        .collect();
    Ok(acf)
}

/// Squared DFT magnitudes of the mean-removed series for bins `1..=n/2`.
pub fn power_spectral_density(series: &TimeSeries) -> Result<Spectrum> {
    let x = series.values();
    let n = x.len();
    if n < 4 {
        return Err(Error::SeriesTooShort { len: n, required: 4 });
    }
    let m = mean(x);
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v - m, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let powers = buf[1..=n / 2].iter().map(|c| c.norm_sqr()).collect();
    Ok(Spectrum { series_len: n, powers })
}

/// Longest lag admitted by the confidence window.
pub fn confidence_window(n: usize, config: &DetectorConfig) -> usize {
    (n as f64 * config.acf_confidence_fraction).floor() as usize
}

/// Frequency bins of the strongest periodogram peaks, strongest first.
///
/// Takes up to `psd_peak_count` bins that are strict local maxima (ties
/// broken toward the lower bin) and drops peaks below the false-alarm level
/// when `psd_false_alarm` is set.
pub fn peak_bins(psd: &Spectrum, config: &DetectorConfig) -> Vec<usize> {
    let p = psd.powers();
    let mut peaks: Vec<(usize, f64)> = (0..p.len())
        .filter(|&i| {
            let left = if i > 0 { p[i - 1] } else { f64::NEG_INFINITY };
            let right = p.get(i + 1).copied().unwrap_or(f64::NEG_INFINITY);
            p[i] > left && p[i] > right
        })
        .map(|i| (i + 1, p[i]))
        .collect();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    peaks.truncate(config.psd_peak_count);

    // Periodogram ordinates of white noise are roughly exponential around the
    // mean power, so a peak beyond mean * ln(bins / p) is unlikely under noise.
    if let Some(false_alarm) = config.psd_false_alarm {
        let floor = mean(p) * (p.len() as f64 / false_alarm).ln().max(0.0);
        peaks.retain(|&(_, power)| power > floor);
    }
    peaks.into_iter().map(|(bin, _)| bin).collect()
}

fn nominal_lag(n: usize, bin: usize) -> usize {
    (n as f64 / bin as f64).round() as usize
}

/// Candidate lags from the strongest periodogram peaks, ascending.
///
/// Each peak bin `b` maps to lag `round(n / b)`; lags outside
/// `2..=confidence_window(n)` are dropped.
pub fn candidate_periods(psd: &Spectrum, n: usize, config: &DetectorConfig) -> Vec<usize> {
    let window = confidence_window(n, config);
    let mut lags: Vec<usize> = peak_bins(psd, config)
        .into_iter()
        .map(|bin| nominal_lag(n, bin))
        .filter(|&lag| lag >= 2 && lag <= window)
        .collect();
    lags.sort_unstable();
    lags.dedup();
    lags
}

/// Lags whose frequency falls into periodogram bin `bin` of an `n`-sample
/// series, i.e. `n / (bin + 1/2) ..= n / (bin - 1/2)`.
pub fn bin_lag_range(n: usize, bin: usize) -> std::ops::RangeInclusive<usize> {
    let n = n as f64;
    let b = bin as f64;
    let lo = (n / (b + 0.5)).ceil() as usize;
    let hi = if bin <= 1 { usize::MAX } else { (n / (b - 0.5)).floor() as usize };
    lo..=hi
}

/// The ACF peak that confirms periodogram bin `bin`.
///
/// Searches the lags belonging to the bin, capped at `max_lag`, for positive
/// local maxima of the ACF and returns the highest one.
pub fn confirm_bin(n: usize, bin: usize, acf: &[f64], max_lag: usize) -> Option<usize> {
    let range = bin_lag_range(n, bin);
    let lo = (*range.start()).max(2);
    let hi = (*range.end()).min(max_lag).min(acf.len().saturating_sub(2));
    (lo..=hi)
        .filter(|&lag| matches!(validate_period(lag, acf), Ok(true)))
        .max_by(|&a, &b| acf[a].total_cmp(&acf[b]).then(b.cmp(&a)))
}

/// True when `acf` has a positive local maximum at `lag`.
pub fn validate_period(lag: usize, acf: &[f64]) -> Result<bool> {
    let max = acf.len().saturating_sub(2);
    if lag < 2 || lag > max {
        return Err(Error::LagOutOfRange { lag, max });
    }
    let here = acf[lag];
    Ok(here > acf[lag - 1] && here >= acf[lag + 1] && here > 0.0)
}

/// Confirmed periods, ascending, with the evidence behind each.
pub fn scored_candidates(series: &TimeSeries, config: &DetectorConfig) -> Result<Vec<PeriodCandidate>> {
    let n = series.len();
    let psd = power_spectral_density(series)?;
    let window = confidence_window(n, config);
    let bins: Vec<usize> =
        peak_bins(&psd, config).into_iter().filter(|&bin| (2..=window).contains(&nominal_lag(n, bin))).collect();
    if bins.is_empty() {
        return Ok(Vec::new());
    }
    let acf = autocorrelation(series, (window + 1).min(n - 1), config.sd_epsilon)?;
    let mut out: Vec<PeriodCandidate> = bins
        .into_iter()
        .filter_map(|bin| {
            confirm_bin(n, bin, &acf, window).map(|lag| PeriodCandidate {
                lag,
                psd_power: psd.power(bin).unwrap_or(0.0),
                acf_value: acf[lag],
            })
        })
        .collect();
    out.sort_by_key(|c| c.lag);
    out.dedup_by_key(|c| c.lag);
    Ok(out)
}

/// Smallest lag confirmed by both the periodogram and the ACF, if any.
pub fn detect_periodicity(series: &TimeSeries, config: &DetectorConfig) -> Option<usize> {
    if series.len() < config.min_detect_length.max(4) {
        return None;
    }
    scored_candidates(series, config).ok()?.first().map(|c| c.lag)
}

/// Remembers the last confirmed period across runs.
///
/// A period is confirmed on first sighting. A different period replaces it
/// only after `SWITCH_CONFIRMATIONS` consecutive identical detections, and a
/// run that finds no period leaves the cache untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PeriodCache {
    pub confirmed_period: Option<usize>,
    pub consecutive_confirmations: u32,
    pub pending_period: Option<usize>,
}

impl PeriodCache {
    pub const SWITCH_CONFIRMATIONS: u32 = 2;

    pub fn update(&self, detected: Option<usize>) -> PeriodCache {
        let Some(period) = detected else {
            return *self;
        };
        match self.confirmed_period {
            None => PeriodCache { confirmed_period: Some(period), ..Default::default() },
            Some(current) if current == period => PeriodCache { confirmed_period: Some(current), ..Default::default() },
            Some(current) => {
                let count = if self.pending_period == Some(period) { self.consecutive_confirmations + 1 } else { 1 };
                if count >= Self::SWITCH_CONFIRMATIONS {
                    PeriodCache { confirmed_period: Some(period), ..Default::default() }
                } else {
                    PeriodCache {
                        confirmed_period: Some(current),
                        consecutive_confirmations: count,
                        pending_period: Some(period),
                    }
                }
            }
        }
    }
}

pub fn update_period_cache(cache: &PeriodCache, detected: Option<usize>) -> PeriodCache {
    cache.update(detected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ts(v: Vec<f64>) -> TimeSeries {
        TimeSeries::new(v).unwrap()
    }

    fn sine(n: usize, period: f64) -> Vec<f64> {
        (0..n).map(|t| (2.0 * PI * t as f64 / period).sin()).collect()
    }

    // Direct evaluation of the biased ACF definition.
    fn acf_oracle(x: &[f64], lag: usize) -> f64 {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let c = |k: usize| (0..x.len() - k).map(|t| (x[t] - m) * (x[t + k] - m)).sum::<f64>() / n;
        c(lag) / c(0)
    }

    // O(n^2) DFT of the mean-removed series.
    fn dft_power_oracle(x: &[f64], bin: usize) -> f64 {
        let n = x.len();
        let m = x.iter().sum::<f64>() / n as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (t, v) in x.iter().enumerate() {
            let ang = -2.0 * PI * (bin * t) as f64 / n as f64;
            re += (v - m) * ang.cos();
            im += (v - m) * ang.sin();
        }
        re * re + im * im
    }

    fn argmax(p: &[f64]) -> usize {
        p.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0 + 1
    }

    #[test]
    fn acf_alternating_sequence() {
        let x: Vec<f64> = (0..8).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let r = autocorrelation(&ts(x.clone()), 2, 1e-12).unwrap();
        assert_eq!(r.len(), 3);
        assert!((r[0] - 1.0).abs() < 1e-15);
        // biased estimator: -7/8 and 6/8
        assert!((r[1] - acf_oracle(&x, 1)).abs() < 1e-12);
        assert!((r[1] + 0.875).abs() < 1e-12);
        assert!((r[2] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn acf_of_sine_peaks_at_period() {
        let x = sine(280, 28.0);
        let r = autocorrelation(&ts(x.clone()), 56, 1e-12).unwrap();
        for k in [1, 14, 27, 28, 29, 56] {
            assert!((r[k] - acf_oracle(&x, k)).abs() < 1e-12, "lag {k}");
        }
        assert!(r[28] > r[27] && r[28] > r[29]);
        // 252 of 280 overlapping samples: exactly 0.9 up to rounding
        assert!(r[28] >= 0.9 - 1e-9, "r[28] = {}", r[28]);
    }

    #[test]
    fn acf_rejects_constant_and_bad_lags() {
        assert_eq!(autocorrelation(&ts(vec![3.0; 10]), 2, 1e-12), Err(Error::DegenerateSeries));
        assert!(matches!(autocorrelation(&ts(vec![1.0]), 1, 1e-12), Err(Error::SeriesTooShort { .. })));
        assert!(matches!(autocorrelation(&ts(vec![1.0, 2.0, 3.0]), 3, 1e-12), Err(Error::LagOutOfRange { .. })));
    }

    #[test]
    fn psd_matches_brute_force_dft() {
        let x: Vec<f64> = sine(280, 28.0).iter().zip(sine(280, 7.0)).map(|(a, b)| a + b).collect();
        let psd = power_spectral_density(&ts(x.clone())).unwrap();
        assert_eq!(psd.powers().len(), 140);
        for bin in [1, 9, 10, 11, 40, 140] {
            let want = dft_power_oracle(&x, bin);
            assert!((psd.power(bin).unwrap() - want).abs() <= 1e-8 * want.max(1.0), "bin {bin}");
        }
        let mut top: Vec<(usize, f64)> = psd.bins().collect();
        top.sort_by(|a, b| b.1.total_cmp(&a.1));
        let mut two = [top[0].0, top[1].0];
        two.sort();
        assert_eq!(two, [10, 40]);
    }

    #[test]
    fn psd_of_sine_peaks_at_bin_ten() {
        let psd = power_spectral_density(&ts(sine(280, 28.0))).unwrap();
        assert_eq!(argmax(psd.powers()), 10);
    }

    #[test]
    fn psd_of_constant_is_zero() {
        let psd = power_spectral_density(&ts(vec![4.2; 16])).unwrap();
        assert!(psd.powers().iter().all(|&p| p.abs() < 1e-20));
        assert!(power_spectral_density(&ts(vec![1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn candidates_from_synthetic_spectra() {
        let cfg = DetectorConfig::default();
        let mut p = vec![1.0; 140];
        p[9] = 1000.0;
        assert_eq!(candidate_periods(&Spectrum::from_powers(280, p), 280, &cfg), vec![28]);

        let mut p = vec![1.0; 50];
        p[0] = 1000.0;
        assert!(candidate_periods(&Spectrum::from_powers(100, p), 100, &cfg).is_empty());

        let mut p = vec![1.0; 140];
        p[9] = 1000.0;
        p[39] = 800.0;
        assert_eq!(candidate_periods(&Spectrum::from_powers(280, p), 280, &cfg), vec![7, 28]);
    }

    #[test]
    fn candidates_of_two_tone_series() {
        let x: Vec<f64> = sine(280, 28.0).iter().zip(sine(280, 7.0)).map(|(a, b)| a + b).collect();
        let psd = power_spectral_density(&ts(x)).unwrap();
        assert_eq!(candidate_periods(&psd, 280, &DetectorConfig::default()), vec![7, 28]);
    }

    #[test]
    fn validate_period_on_sine_acf() {
        let r = autocorrelation(&ts(sine(280, 28.0)), 94, 1e-12).unwrap();
        assert!(validate_period(28, &r).unwrap());
        assert!(!validate_period(14, &r).unwrap());
        assert!(r[14] < 0.0);
    }

    #[test]
    fn validate_period_rejects_monotone_acf() {
        let r: Vec<f64> = (0..30).map(|k| 0.9f64.powi(k)).collect();
        for lag in 2..=28 {
            assert!(!validate_period(lag, &r).unwrap());
        }
        assert!(matches!(validate_period(1, &r), Err(Error::LagOutOfRange { .. })));
        assert!(matches!(validate_period(29, &r), Err(Error::LagOutOfRange { .. })));
    }

    #[test]
    fn detects_sine_period() {
        let cfg = DetectorConfig::default();
        assert_eq!(detect_periodicity(&ts(sine(280, 28.0)), &cfg), Some(28));
        let c = scored_candidates(&ts(sine(280, 28.0)), &cfg).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].lag, 28);
        assert!(c[0].acf_value > 0.89 && c[0].psd_power > 0.0);
    }

    #[test]
    fn smallest_validated_period_wins() {
        let x: Vec<f64> = sine(280, 28.0).iter().zip(sine(280, 7.0)).map(|(a, b)| a + b).collect();
        assert_eq!(detect_periodicity(&ts(x), &DetectorConfig::default()), Some(7));
    }

    #[test]
    fn bin_ranges_cover_the_lag_axis() {
        assert_eq!(bin_lag_range(280, 10), 27..=29);
        assert_eq!(bin_lag_range(104, 4), 24..=29);
        assert_eq!(*bin_lag_range(100, 1).start(), 67);
    }

    #[test]
    fn off_grid_lengths_still_find_the_period() {
        // 290 / 28 is not an integer: the peak bin maps to lag 29, the ACF
        // maximum sits at 28
        let cfg = DetectorConfig::default();
        let psd = power_spectral_density(&ts(sine(290, 28.0))).unwrap();
        assert_eq!(candidate_periods(&psd, 290, &cfg), vec![29]);
        assert_eq!(detect_periodicity(&ts(sine(290, 28.0)), &cfg), Some(28));
        for p in [7usize, 14, 28] {
            for n in 10 * p..14 * p {
                assert_eq!(detect_periodicity(&ts(sine(n, p as f64)), &cfg), Some(p), "n = {n}, p = {p}");
            }
        }
    }

    #[test]
    fn short_and_constant_series_are_aperiodic() {
        let cfg = DetectorConfig::default();
        assert_eq!(detect_periodicity(&ts(sine(10, 3.0)), &cfg), None);
        assert_eq!(detect_periodicity(&ts(vec![1.0; 100]), &cfg), None);
    }

    #[test]
    fn cache_first_detection_confirms() {
        let c = PeriodCache::default().update(Some(28));
        assert_eq!(c.confirmed_period, Some(28));
        assert_eq!(c.pending_period, None);
    }

    #[test]
    fn cache_survives_loss_of_periodicity() {
        let c = PeriodCache { confirmed_period: Some(28), ..Default::default() };
        assert_eq!(update_period_cache(&c, None), c);
    }

    #[test]
    fn cache_switches_after_two_detections() {
        let c = PeriodCache { confirmed_period: Some(28), ..Default::default() };
        let once = c.update(Some(14));
        assert_eq!(once.confirmed_period, Some(28));
        assert_eq!(once.pending_period, Some(14));
        let twice = once.update(Some(14));
        assert_eq!(twice.confirmed_period, Some(14));
        assert_eq!(twice.pending_period, None);
        // an interleaved different value restarts the count
        let reset = once.update(Some(7)).update(Some(14));
        assert_eq!(reset.confirmed_period, Some(28));
        // re-detecting the confirmed value clears a pending switch
        let cleared = once.update(Some(28));
        assert_eq!(cleared, c);
    }
}
