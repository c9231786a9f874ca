//! Bucketing and the local-polynomial trend replica.
//!
//! The series is cut into contiguous buckets starting at index 0. For a
//! periodic series each bucket spans one period and the polynomial degree
//! grows by one for every `degree_step` points. Aperiodic series use short
//! linear buckets, or in optimized mode a fixed fraction of the length with a
//! quadratic. A short final remainder is merged into the previous bucket.
//!
//! The per-bucket fits are stacked, then every interior break is smoothed by
//! a fit of the same window size centred on it, cross-faded into the stacked
//! curve over half a window.

mod polyfit;

use serde::{Deserialize, Serialize};

pub use polyfit::{fit_polynomial, PolyFit};

use crate::error::{Error, Result};
use crate::series::{DetectorConfig, TimeSeries};

/// Half-open index range `[start, end)` with its polynomial degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bucket {
    pub start: usize,
    pub end: usize,
    pub degree: usize,
}

impl Bucket {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

/// Buckets tiling `[0, series_length)` in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketPlan {
    buckets: Vec<Bucket>,
    series_length: usize,
    /// Nominal bucket size, also the width of the break-smoothing fits.
    window: usize,
}

impl BucketPlan {
    /// Checks that `buckets` tile `[0, series_length)` and that every bucket
    /// can carry its degree.
    pub fn new(buckets: Vec<Bucket>, series_length: usize, window: usize) -> Result<Self> {
        let mut next = 0;
        for b in &buckets {
            if b.start != next || b.end <= b.start {
                return Err(Error::InvalidArgument(format!("bucket {}..{} breaks the tiling", b.start, b.end)));
            }
            if b.len() < b.degree + 1 {
                return Err(Error::InvalidArgument(format!(
                    "bucket {}..{} is too short for degree {}",
                    b.start, b.end, b.degree
                )));
            }
            next = b.end;
        }
        if next != series_length {
            return Err(Error::InvalidArgument(format!("buckets cover {next} of {series_length} samples")));
        }
        Ok(Self { buckets, series_length, window: window.max(1) })
    }

    pub fn buckets(&self) -> &[Bucket] {
        &self.buckets
    }

    pub fn series_length(&self) -> usize {
        self.series_length
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    /// Index of the bucket containing sample `i`.
    pub fn bucket_of(&self, i: usize) -> Option<usize> {
        if i >= self.series_length {
            return None;
        }
        Some(self.buckets.partition_point(|b| b.end <= i))
    }
}

/// The stacked, break-smoothed trend. Same length as its source series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendReplica {
    pub values: Vec<f64>,
}

/// One polynomial degree per `degree_step` points, between 1 and `max_degree`.
pub fn degree_for_window(window_size: usize, config: &DetectorConfig) -> usize {
    window_size.div_ceil(config.degree_step).clamp(1, config.max_degree)
}

pub fn plan_buckets(
    series_length: usize,
    period: Option<usize>,
    optimized: bool,
    config: &DetectorConfig,
) -> Result<BucketPlan> {
    let n = series_length;
    if n < 3 {
        return Err(Error::SeriesTooShort { len: n, required: 3 });
    }
    if let Some(p) = period {
        if p < 2 || p >= n {
            return Err(Error::InvalidArgument(format!("period {p} outside 2..{n}")));
        }
    }
    let (nominal, degree) = match period {
        Some(p) => (p, degree_for_window(p, config)),
        None if optimized => {
            let w = (n as f64 * config.optimized_window_fraction).ceil() as usize;
            (w.max(2), config.optimized_degree)
        }
        None => (config.aperiodic_window, 1),
    };
    let degree_of = |size: usize| if period.is_some() { degree_for_window(size, config) } else { degree };
    // every bucket must be overdetermined
    let window = nominal.max(degree + 2);

    if n < window {
        let mut d = degree_of(n);
        if n < d + 2 {
            d = 1;
        }
        return BucketPlan::new(vec![Bucket { start: 0, end: n, degree: d }], n, window);
    }

    let full = n / window;
    let remainder = n % window;
    let mut buckets: Vec<Bucket> =
        (0..full).map(|k| Bucket { start: k * window, end: (k + 1) * window, degree }).collect();
    if remainder > 0 {
        let min_standalone = (degree + 2).max(window.div_ceil(2));
        if remainder < min_standalone {
            let last = buckets.last_mut().expect("n >= window gives at least one bucket");
            last.end = n;
            last.degree = degree_of(last.len());
        } else {
            buckets.push(Bucket { start: full * window, end: n, degree: degree_of(remainder) });
        }
    }
    BucketPlan::new(buckets, n, window)
}

/// Concatenation of the per-bucket fits, before break smoothing.
pub fn stack_local_fits(series: &TimeSeries, plan: &BucketPlan) -> Result<Vec<f64>> {
    check_plan(series, plan)?;
    let y = series.values();
    let mut out = vec![0.0; y.len()];
    for b in plan.buckets() {
        let xs: Vec<f64> = b.range().map(|i| i as f64).collect();
        let fit = fit_polynomial(&xs, &y[b.range()], b.degree)?;
        for i in b.range() {
            out[i] = fit.eval(i as f64);
        }
    }
    Ok(out)
}

/// Radius of the cross-fade around a break for a given window.
///
/// Samples strictly inside `break ± radius` are blended, which is about half
/// a window of points.
pub fn blend_radius(window: usize) -> usize {
    ((window as f64 / 4.0).round() as usize).max(1)
}

pub fn build_trend(series: &TimeSeries, plan: &BucketPlan) -> Result<TrendReplica> {
    let stacked = stack_local_fits(series, plan)?;
    let y = series.values();
    let n = y.len();
    let window = plan.window().min(n);
    let radius = blend_radius(plan.window());
    let mut values = stacked.clone();

    for pair in plan.buckets().windows(2) {
        let brk = pair[1].start;
        let hi = (brk.saturating_sub(window / 2) + window).min(n);
        let lo = hi - window;
        let xs: Vec<f64> = (lo..hi).map(|i| i as f64).collect();
        let degree = pair[0].degree.min(window - 1);
        let fit = fit_polynomial(&xs, &y[lo..hi], degree)?;

        let from = brk.saturating_sub(radius - 1);
        let to = (brk + radius).min(n);
        for i in from..to {
            let weight = 1.0 - i.abs_diff(brk) as f64 / radius as f64;
            values[i] = weight * fit.eval(i as f64) + (1.0 - weight) * stacked[i];
        }
    }
    Ok(TrendReplica { values })
}

fn check_plan(series: &TimeSeries, plan: &BucketPlan) -> Result<()> {
    if plan.series_length() != series.len() {
        return Err(Error::LengthMismatch { expected: plan.series_length(), actual: series.len() });
    }
    Ok(())
}
