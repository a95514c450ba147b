//! Power-law exponents by least squares in log-log space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub max_abs_residual: f64,
    pub n_points: usize,
}

impl FitResult {
    /// `10^intercept * x^slope`
    pub fn predict(&self, x: f64) -> f64 {
        10f64.powf(self.intercept) * x.powf(self.slope)
    }
}

/// Fits `log10 y = slope * log10 x + intercept`.
///
/// Both coordinates must be positive and finite.
pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::Validation(format!(
            "fit needs paired data, got {} x and {} y values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            got: xs.len(),
        });
    }
    for (&x, &y) in xs.iter().zip(ys) {
        if !(x.is_finite() && x > 0.0 && y.is_finite() && y > 0.0) {
            return Err(Error::Validation(format!(
                "log-log fit needs positive finite values, got ({x}, {y})"
            )));
        }
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.log10()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.log10()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Validation("fit needs at least two distinct x values".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_abs_residual = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    Ok(FitResult {
        slope,
        intercept,
        max_abs_residual,
        n_points: xs.len(),
    })
}

/// `count` points spaced evenly in `log10` from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..count)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
        .collect()
}

/// Integer grid with `per_decade` points per decade, deduplicated after
/// rounding.
pub fn log_grid_n(lo: usize, hi: usize, per_decade: usize) -> Vec<usize> {
    let decades = (hi as f64 / lo as f64).log10();
    let count = ((decades * per_decade as f64).round() as usize).max(1) + 1;
    let mut out: Vec<usize> = log_grid(lo as f64, hi as f64, count)
        .into_iter()
        .map(|x| x.round() as usize)
        .collect();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let xs = log_grid(10.0, 1e5, 9);
        for (c, p) in [(3.0, -0.75), (0.2, -0.5), (1.0, 1.0)] {
            let ys: Vec<f64> = xs.iter().map(|x| c * x.powf(p)).collect();
            let fit = fit_exponent(&xs, &ys).unwrap();
            assert!((fit.slope - p).abs() < 1e-12);
            assert!((fit.intercept - c.log10()).abs() < 1e-12);
            assert!(fit.max_abs_residual < 1e-12);
            assert_eq!(fit.n_points, 9);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            fit_exponent(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::InsufficientPoints { .. })
        ));
        assert!(fit_exponent(&[1.0, 2.0, 3.0], &[1.0, -2.0, 3.0]).is_err());
        assert!(fit_exponent(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn integer_grid() {
        let g = log_grid_n(100, 10_000, 10);
        assert_eq!(g.first(), Some(&100));
        assert_eq!(g.last(), Some(&10_000));
        assert_eq!(g.len(), 21);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
