// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::FourierGrid;

/// Phase rate of `U^c` on FFT index `j`: `c xi^3`, or `0` on the unpaired Nyquist mode
/// so that real fields stay real.
#[inline]
pub fn airy_symbol(grid: &FourierGrid, j: usize, c: f64) -> f64 {
    if j == grid.nyquist_index() {
        0.0
    } else {
        let xi = grid.xi()[j];
        c * xi * xi * xi
    }
}

/// `U^c(t) f = (e^{i t c xi^3} fhat)^check`.
pub fn unitary_group_apply(f: &[f64], t: f64, c: f64, grid: &FourierGrid) -> Result<Vec<f64>> {
    if !f.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("unitary_group_apply input"));
    }
    let mut fhat = grid.forward(f);
    unitary_group_apply_spectrum(&mut fhat, t, c, grid);
    Ok(grid.inverse_real(&fhat))
}

pub fn unitary_group_apply_spectrum(fhat: &mut [Complex64], t: f64, c: f64, grid: &FourierGrid) {
    for (j, z) in fhat.iter_mut().enumerate() {
        *z *= Complex64::from_polar(1.0, t * airy_symbol(grid, j, c));
    }
}
