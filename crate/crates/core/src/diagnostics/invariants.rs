// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spectral::{sobolev_norm, FieldPair, FourierGrid};

/// Conserved functionals and Sobolev norms at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantRecord {
    pub time: f64,
    #[serde(rename = "I1")]
    pub i1: f64,
    #[serde(rename = "I2")]
    pub i2: f64,
    pub hs_v: f64,
    pub hk_w: f64,
}

impl InvariantRecord {
    pub fn measure(time: f64, state: &FieldPair, grid: &FourierGrid, s: f64, k: f64) -> Result<Self> {
        state.check_finite()?;
        state.check_grid(grid)?;
        Ok(Self {
            time,
            i1: invariant_i1(state, grid)?,
            i2: invariant_i2(state, grid)?,
            hs_v: sobolev_norm(&state.v, s, grid)?,
            hk_w: sobolev_norm(&state.w, k, grid)?,
        })
    }
}

/// `I1 = int (v^2 + w^2)` by the trapezoidal rule, which is spectrally accurate
/// for periodic samples.
pub fn invariant_i1(state: &FieldPair, grid: &FourierGrid) -> Result<f64> {
    state.check_finite()?;
    state.check_grid(grid)?;
    let sum: f64 = state.v.iter().zip(&state.w).map(|(a, b)| a * a + b * b).sum();
    Ok(sum * grid.dx())
}

/// `I2 = int (v_x^2 + w_x^2 - v^2 w^2)` with spectral derivatives.
pub fn invariant_i2(state: &FieldPair, grid: &FourierGrid) -> Result<f64> {
    state.check_finite()?;
    state.check_grid(grid)?;
    let vx = spectral_derivative(&state.v, grid);
    let wx = spectral_derivative(&state.w, grid);
    let sum: f64 = (0..grid.n())
        .map(|j| vx[j] * vx[j] + wx[j] * wx[j] - (state.v[j] * state.w[j]).powi(2))
        .sum();
    Ok(sum * grid.dx())
}

/// Relative drift of a conserved quantity, guarded against tiny reference values.
pub fn relative_drift(reference: f64, value: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(1e-14)
}

/// Largest relative drift of `I1` and `I2` along a record.
pub fn max_drift(records: &[InvariantRecord]) -> (f64, f64) {
    let Some(first) = records.first() else {
        return (0.0, 0.0);
    };
    records.iter().fold((0.0, 0.0), |(d1, d2), r| {
        (d1.max(relative_drift(first.i1, r.i1)), d2.max(relative_drift(first.i2, r.i2)))
    })
}

pub fn spectral_derivative(f: &[f64], grid: &FourierGrid) -> Vec<f64> {
    let mut fhat = grid.forward(f);
    let nyq = grid.nyquist_index();
    for (j, z) in fhat.iter_mut().enumerate() {
        *z = if j == nyq { 0.0.into() } else { *z * num_complex::Complex64::new(0.0, grid.xi()[j]) };
    }
    grid.inverse_real(&fhat)
}
