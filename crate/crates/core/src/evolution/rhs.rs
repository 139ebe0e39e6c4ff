// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::{FieldPair, FourierGrid};

/// Spectral coefficients of `(v, w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPair {
    pub v: Vec<Complex64>,
    pub w: Vec<Complex64>,
}

impl SpectralPair {
    pub fn zeros(n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Self { v: z.clone(), w: z }
    }

    pub fn from_fields(state: &FieldPair, grid: &FourierGrid) -> Self {
        Self { v: grid.forward(&state.v), w: grid.forward(&state.w) }
    }

    pub fn to_fields(&self, grid: &FourierGrid) -> FieldPair {
        FieldPair { v: grid.inverse_real(&self.v), w: grid.inverse_real(&self.w) }
    }

    pub fn is_finite(&self) -> bool {
        self.v
            .iter()
            .chain(&self.w)
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `self + c * other`
    pub fn axpy(&self, c: f64, other: &Self) -> Self {
        Self {
            v: self.v.iter().zip(&other.v).map(|(a, b)| a + c * b).collect(),
            w: self.w.iter().zip(&other.w).map(|(a, b)| a + c * b).collect(),
        }
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.v
            .iter()
            .zip(&other.v)
            .chain(self.w.iter().zip(&other.w))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// The cubic terms `(-(v w^2)_x, -(v^2 w)_x)` with a dealiasing mask.
///
/// Products are formed in physical space from the masked fields; the derivative
/// is applied in frequency space and the result is masked again.
#[derive(Debug, Clone)]
pub struct Nonlinearity {
    grid: FourierGrid,
    mask: Vec<bool>,
    minus_i_xi: Vec<Complex64>,
}

impl Nonlinearity {
    pub fn new(grid: &FourierGrid, dealias_fraction: f64) -> Self {
        let mask = grid.dealias_mask(dealias_fraction);
        let minus_i_xi = grid
            .xi()
            .iter()
            .enumerate()
            .map(|(j, &xi)| {
                if mask[j] && j != grid.nyquist_index() {
                    Complex64::new(0.0, -xi)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Self { grid: grid.clone(), mask, minus_i_xi }
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Zero every mode outside the mask.
    pub fn project(&self, state: &mut SpectralPair) {
        for (j, keep) in self.mask.iter().enumerate() {
            if !keep {
                state.v[j] = Complex64::new(0.0, 0.0);
                state.w[j] = Complex64::new(0.0, 0.0);
            }
        }
    }

    pub fn eval(&self, state: &SpectralPair) -> SpectralPair {
        let masked = |c: &[Complex64]| -> Vec<Complex64> {
            c.iter()
                .zip(&self.mask)
                .map(|(z, &m)| if m { *z } else { Complex64::new(0.0, 0.0) })
                .collect()
        };
        let v = self.grid.inverse_real(&masked(&state.v));
        let w = self.grid.inverse_real(&masked(&state.w));
        let vw2: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a * b * b).collect();
        let v2w: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a * a * b).collect();
        let dv = self.grid.forward(&vw2);
        let dw = self.grid.forward(&v2w);
        SpectralPair {
            v: dv.iter().zip(&self.minus_i_xi).map(|(a, d)| a * d).collect(),
            w: dw.iter().zip(&self.minus_i_xi).map(|(a, d)| a * d).collect(),
        }
    }
}

/// Physical-space wrapper: returns `(-(v w^2)_x, -(v^2 w)_x)`.
pub fn nonlinear_rhs(state: &FieldPair, grid: &FourierGrid, dealias_fraction: f64) -> Result<FieldPair> {
    state.check_finite()?;
    state.check_grid(grid)?;
    let nl = Nonlinearity::new(grid, dealias_fraction);
    Ok(nl.eval(&SpectralPair::from_fields(state, grid)).to_fields(grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn vanishes_when_either_component_is_zero() {
        let g = FourierGrid::new(32, PI).unwrap();
        let a = FieldPair::from_fns(&g, |x| x.sin() + 0.2, |_| 0.0);
        let b = FieldPair::from_fns(&g, |_| 0.0, |x| (2.0 * x).cos());
        for st in [a, b] {
            let r = nonlinear_rhs(&st, &g, 2.0 / 3.0).unwrap();
            assert_eq!(r.max_abs(), 0.0);
        }
    }

    #[test]
    fn cosine_cube_identity() {
        // -(cos^3 x)_x = 3 cos^2 x sin x = (3/4)(sin x + sin 3x)
        let g = FourierGrid::new(16, PI).unwrap();
        let st = FieldPair::from_fns(&g, f64::cos, f64::cos);
        let r = nonlinear_rhs(&st, &g, 1.0).unwrap();
        let expect = g.sample(|x| 0.75 * (x.sin() + (3.0 * x).sin()));
        let pointwise = g.sample(|x| 3.0 * x.cos().powi(2) * x.sin());
        for ((a, b), c) in r.v.iter().zip(&expect).zip(&pointwise) {
            assert!((a - b).abs() < 1e-12);
            assert!((b - c).abs() < 1e-12);
        }
        for (a, b) in r.w.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn output_has_zero_mean() {
        let g = FourierGrid::new(64, 10.0).unwrap();
        let st = FieldPair::gaussian(&g, 0.7, 1.0, 0.5);
        let r = nonlinear_rhs(&st, &g, 2.0 / 3.0).unwrap();
        let mean_v: f64 = r.v.iter().sum::<f64>() / 64.0;
        let mean_w: f64 = r.w.iter().sum::<f64>() / 64.0;
        assert!(mean_v.abs() < 1e-15 && mean_w.abs() < 1e-15);
    }
}
