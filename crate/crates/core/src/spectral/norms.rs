// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

use super::grid::{FourierGrid, SpaceTimeGrid};
use super::weight::{bracket, WeightSpec};
use crate::error::{Error, Result};

fn check_real(f: &[f64], what: &'static str) -> Result<()> {
    if f.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// `H^s` norm on the box: `(2L sum_j <xi_j>^{2s} |fhat_j|^2)^{1/2}`.
pub fn sobolev_norm(f: &[f64], s: f64, grid: &FourierGrid) -> Result<f64> {
    check_real(f, "sobolev_norm input")?;
    Ok(sobolev_norm_spectrum(&grid.forward(f), s, grid))
}

/// Same as [`sobolev_norm`] for an already transformed field.
pub fn sobolev_norm_spectrum(fhat: &[Complex64], s: f64, grid: &FourierGrid) -> f64 {
    let sum: f64 = fhat
        .iter()
        .zip(grid.xi())
        .map(|(c, &xi)| bracket(xi).powf(2.0 * s) * c.norm_sqr())
        .sum();
    (grid.length() * sum).sqrt()
}

/// Physical-space rectangle-rule `L^2` norm (spectrally accurate for periodic data).
pub fn l2_norm_quadrature(f: &[f64], grid: &FourierGrid) -> f64 {
    (grid.dx() * f.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

/// Discrete `X^c_{s,b}` norm: 2D transform, weight `<xi>^s <tau - c xi^3>^b`,
/// `L^2` sum with the box measure `2L * T`.
pub fn bourgain_norm(f: &[Complex64], grid: &SpaceTimeGrid, s: f64, b: f64, c: f64) -> Result<f64> {
    if !f.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("bourgain_norm input"));
    }
    let fhat = grid.forward(f);
    let weight = WeightSpec::new(s, c, b);
    let n = grid.space().n();
    let xi = grid.space().xi();
    let tau = grid.tau();
    let mut sum = 0.0;
    for (k, row) in fhat.chunks(n).enumerate() {
        for (j, z) in row.iter().enumerate() {
            let w = weight.eval(xi[j], tau[k]);
            sum += w * w * z.norm_sqr();
        }
    }
    Ok((grid.space().length() * grid.period() * sum).sqrt())
}
