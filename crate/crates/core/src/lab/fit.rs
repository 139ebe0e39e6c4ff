// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares slope of `ln ratio` against `ln N`, with its standard error.
///
/// Needs at least four points, positive ratios and strictly increasing `N`.
pub fn fit_scaling_exponent(entries: &[(f64, f64)]) -> Result<(f64, f64)> {
    if entries.len() < 4 {
        return Err(Error::TooFewPoints { needed: 4, got: entries.len() });
    }
    for &(n, r) in entries {
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NonPositive(n));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::NonPositive(r));
        }
    }
    if entries.windows(2).any(|p| p[1].0 <= p[0].0) {
        return Err(Error::NotIncreasing);
    }
    let n = entries.len() as f64;
    let xs: Vec<f64> = entries.iter().map(|e| e.0.ln()).collect();
    let ys: Vec<f64> = entries.iter().map(|e| e.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let stderr = (rss / (n - 2.0) / sxx).sqrt();
    Ok((slope, stderr))
}

/// Per-N measurements of an estimate ratio with the fitted exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSeries {
    pub label: String,
    pub entries: Vec<RatioEntry>,
    pub fitted_slope: f64,
    pub slope_stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioEntry {
    pub n: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Rigorous bracket on `ratio` from the frozen-weight error bound.
    pub ratio_lo: f64,
    pub ratio_hi: f64,
}

impl RatioSeries {
    /// Sorts by `N` then fits.
    pub fn from_entries(label: impl Into<String>, mut entries: Vec<RatioEntry>) -> Result<Self> {
        entries.sort_by(|a, b| a.n.total_cmp(&b.n));
        let pts: Vec<(f64, f64)> = entries.iter().map(|e| (e.n, e.ratio)).collect();
        let (fitted_slope, slope_stderr) = fit_scaling_exponent(&pts)?;
        Ok(Self { label: label.into(), entries, fitted_slope, slope_stderr })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn planted_square_law() {
        let pts: Vec<(f64, f64)> = [2.0, 4.0, 8.0, 16.0, 32.0].iter().map(|&n: &f64| (n, n * n)).collect();
        let (s, e) = fit_scaling_exponent(&pts).unwrap();
        assert!((s - 2.0).abs() < 1e-12 && e < 1e-12);
    }

    #[test]
    fn constant_ratio() {
        let pts: Vec<(f64, f64)> = (1..6).map(|i| (i as f64, 3.5)).collect();
        assert!(fit_scaling_exponent(&pts).unwrap().0.abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(fit_scaling_exponent(&[(1.0, 1.0); 3]), Err(Error::TooFewPoints { .. })));
        let neg = [(1.0, 1.0), (2.0, -1.0), (3.0, 1.0), (4.0, 1.0)];
        assert!(matches!(fit_scaling_exponent(&neg), Err(Error::NonPositive(_))));
        let dup = [(1.0, 1.0), (1.0, 1.0), (3.0, 1.0), (4.0, 1.0)];
        assert_eq!(fit_scaling_exponent(&dup), Err(Error::NotIncreasing));
    }

    proptest! {
        #[test]
        fn recovers_planted_power(p in -3.0f64..3.0, c in 0.1f64..10.0) {
            let pts: Vec<(f64, f64)> = (0..6).map(|i| { let n = 4.0 * 2f64.powi(i); (n, c * n.powf(p)) }).collect();
            let (s, e) = fit_scaling_exponent(&pts).unwrap();
            prop_assert!((s - p).abs() < 1e-12);
            prop_assert!(e < 1e-12);
        }
    }
}
