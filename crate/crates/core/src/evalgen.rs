//! Synthetic benchmark series and detector scoring.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// A series with its ground-truth anomaly indices (ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSeries {
    pub series: TimeSeries,
    pub truth: Vec<usize>,
}

/// Sine with linearly growing amplitude plus Gaussian noise. Anomaly-free.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeteroSineSpec {
    pub n: usize,
    pub period: usize,
    pub base_amplitude: f64,
    /// Amplitude added per sample.
    pub amplitude_growth: f64,
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for HeteroSineSpec {
    fn default() -> Self {
        Self { n: 256, period: 28, base_amplitude: 1.0, amplitude_growth: 0.01, noise_sd: 0.05, seed: 0 }
    }
}

/// Gaussian noise around zero with a level shift from `break_index` on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakoutSpec {
    pub n: usize,
    pub break_index: usize,
    pub level_shift: f64,
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for BreakoutSpec {
    fn default() -> Self {
        Self { n: 500, break_index: 250, level_shift: 0.4, noise_sd: 0.05, seed: 0 }
    }
}

// ChaCha8 is specified bit-for-bit, so fixtures match across platforms.
fn noise(seed: u64, n: usize, sd: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sd * z
        })
        .collect()
}

fn check_sd(sd: f64) -> Result<()> {
    if sd >= 0.0 && sd.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("noise_sd must be a non-negative number, got {sd}")))
    }
}

pub fn gen_hetero_sine(spec: &HeteroSineSpec) -> Result<LabeledSeries> {
    if spec.period == 0 || spec.n < 2 * spec.period {
        return Err(Error::InvalidArgument(format!(
            "need n >= 2 * period, got n = {} and period = {}",
            spec.n, spec.period
        )));
    }
    check_sd(spec.noise_sd)?;
    let values = noise(spec.seed, spec.n, spec.noise_sd)
        .into_iter()
        .enumerate()
        .map(|(t, e)| {
            let t = t as f64;
            let amp = spec.base_amplitude + spec.amplitude_growth * t;
            amp * (2.0 * std::f64::consts::PI * t / spec.period as f64).sin() + e
        })
        .collect();
    Ok(LabeledSeries { series: TimeSeries::new(values)?, truth: Vec::new() })
}

pub fn gen_breakout(spec: &BreakoutSpec) -> Result<LabeledSeries> {
    if spec.break_index == 0 || spec.break_index >= spec.n {
        return Err(Error::InvalidArgument(format!("break index {} outside 1..{}", spec.break_index, spec.n)));
    }
    check_sd(spec.noise_sd)?;
    let values = noise(spec.seed, spec.n, spec.noise_sd)
        .into_iter()
        .enumerate()
        .map(|(t, e)| if t >= spec.break_index { e + spec.level_shift } else { e })
        .collect();
    Ok(LabeledSeries { series: TimeSeries::new(values)?, truth: vec![spec.break_index] })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// Scores predicted indices against the truth over a series of length `n`.
///
/// A prediction within `tolerance` of a truth index counts as a hit. Pairs are
/// matched greedily, closest first, and each index is used at most once.
pub fn confusion(predicted: &[usize], truth: &[usize], n: usize, tolerance: usize) -> ConfusionCounts {
    let mut predicted = predicted.to_vec();
    predicted.sort_unstable();
    predicted.dedup();
    let mut truth = truth.to_vec();
    truth.sort_unstable();
    truth.dedup();

    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    for (pi, &p) in predicted.iter().enumerate() {
        let lo = truth.partition_point(|&t| t + tolerance < p);
        for (ti, &t) in truth.iter().enumerate().skip(lo) {
            if t > p + tolerance {
                break;
            }
            pairs.push((p.abs_diff(t), ti, pi));
        }
    }
    pairs.sort_unstable();

    let mut used_pred = vec![false; predicted.len()];
    let mut used_truth = vec![false; truth.len()];
    let mut tp = 0;
    for (_, ti, pi) in pairs {
        if !used_pred[pi] && !used_truth[ti] {
            used_pred[pi] = true;
            used_truth[ti] = true;
            tp += 1;
        }
    }
    let fp = predicted.len() - tp;
    let fn_ = truth.len() - tp;
    ConfusionCounts { tp, fp, fn_, tn: n.saturating_sub(tp + fp + fn_) }
}

/// Harmonic mean of precision and recall; 0 when either is undefined.
pub fn f1(counts: &ConfusionCounts) -> f64 {
    let ConfusionCounts { tp, fp, fn_, .. } = *counts;
    if tp == 0 {
        return 0.0;
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    2.0 * precision * recall / (precision + recall)
}
