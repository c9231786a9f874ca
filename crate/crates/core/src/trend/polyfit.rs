use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Singular values below this fraction of the largest count as zero.
const RANK_TOLERANCE: f64 = 1e-10;

/// A least-squares polynomial in a rescaled abscissa.
///
/// Coefficients apply to `t = (x - center) / half_width`, which maps the
/// fitted abscissae onto `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    coeffs: Vec<f64>,
    center: f64,
    half_width: f64,
}

impl PolyFit {
    /// Coefficients in ascending powers of the rescaled abscissa.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree actually fitted. May be lower than requested after a rank fallback.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn rescale(&self, x: f64) -> f64 {
        (x - self.center) / self.half_width
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = self.rescale(x);
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

/// Least-squares polynomial of the given degree through `(xs, ys)`.
///
/// If the design matrix is numerically rank deficient the degree is lowered
/// one step at a time; [`Error::RankDeficient`] is returned only when even a
/// constant cannot be fitted.
pub fn fit_polynomial(xs: &[f64], ys: &[f64], degree: usize) -> Result<PolyFit> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), actual: ys.len() });
    }
    if xs.len() < degree + 1 {
        return Err(Error::SeriesTooShort { len: xs.len(), required: degree + 1 });
    }
    let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let center = 0.5 * (lo + hi);
    let half_width = if hi > lo { 0.5 * (hi - lo) } else { 1.0 };
    let ts: Vec<f64> = xs.iter().map(|x| (x - center) / half_width).collect();
    let rhs = DVector::from_column_slice(ys);

    for deg in (0..=degree).rev() {
        let design = DMatrix::from_fn(ts.len(), deg + 1, |i, j| ts[i].powi(j as i32));
        let svd = design.svd(true, true);
        let smax = svd.singular_values.max();
        if smax.is_nan() || smax <= 0.0 {
            continue;
        }
        let rank = svd.singular_values.iter().filter(|&&s| s > RANK_TOLERANCE * smax).count();
        if rank < deg + 1 {
            continue;
        }
        let sol = svd.solve(&rhs, RANK_TOLERANCE * smax).map_err(|_| Error::RankDeficient)?;
        return Ok(PolyFit { coeffs: sol.iter().copied().collect(), center, half_width });
    }
    Err(Error::RankDeficient)
}
