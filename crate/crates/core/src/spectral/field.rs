// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::grid::FourierGrid;
use crate::error::{Error, Result};

/// The state `(v, w)` as real samples on one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldPair {
    pub v: Vec<f64>,
    pub w: Vec<f64>,
}

impl FieldPair {
    pub fn new(v: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        if v.len() != w.len() {
            return Err(Error::GridMismatch(format!(
                "v has {} samples, w has {}",
                v.len(),
                w.len()
            )));
        }
        let pair = Self { v, w };
        pair.check_finite()?;
        Ok(pair)
    }

    pub fn zeros(n: usize) -> Self {
        Self { v: vec![0.0; n], w: vec![0.0; n] }
    }

    pub fn from_fns(grid: &FourierGrid, v: impl Fn(f64) -> f64, w: impl Fn(f64) -> f64) -> Self {
        Self { v: grid.sample(v), w: grid.sample(w) }
    }

    /// Gaussian pair `(a e^{-x^2/(2 s^2)}, a e^{-(x - shift)^2/(2 s^2)})`.
    pub fn gaussian(grid: &FourierGrid, amplitude: f64, width: f64, shift: f64) -> Self {
        let g = |x: f64| amplitude * (-x * x / (2.0 * width * width)).exp();
        Self::from_fns(grid, g, |x| g(x - shift))
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.v.iter().chain(&self.w).all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("field pair"))
        }
    }

    pub fn check_grid(&self, grid: &FourierGrid) -> Result<()> {
        if self.v.len() != grid.n() || self.w.len() != grid.n() {
            return Err(Error::GridMismatch(format!(
                "field has {} samples, grid has {}",
                self.v.len(),
                grid.n()
            )));
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            v: self.v.iter().map(|x| c * x).collect(),
            w: self.w.iter().map(|x| c * x).collect(),
        }
    }

    /// Max-norm distance.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.v
            .iter()
            .zip(&other.v)
            .chain(self.w.iter().zip(&other.w))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.v.iter().chain(&self.w).map(|x| x.abs()).fold(0.0, f64::max)
    }
}
