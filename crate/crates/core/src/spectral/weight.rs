// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

/// `<x> = 1 + |x|`.
#[inline]
pub fn bracket(x: f64) -> f64 {
    1.0 + x.abs()
}

/// Product weight `<xi>^sobolev_exp * <tau - dispersion xi^3>^temporal_exp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub sobolev_exp: f64,
    pub dispersion: f64,
    pub temporal_exp: f64,
}

impl WeightSpec {
    pub fn new(sobolev_exp: f64, dispersion: f64, temporal_exp: f64) -> Self {
        Self { sobolev_exp, dispersion, temporal_exp }
    }

    /// Modulation `tau - c xi^3`.
    #[inline]
    pub fn modulation(&self, xi: f64, tau: f64) -> f64 {
        tau - self.dispersion * xi * xi * xi
    }

    #[inline]
    pub fn eval(&self, xi: f64, tau: f64) -> f64 {
        bracket(xi).powf(self.sobolev_exp) * bracket(self.modulation(xi, tau)).powf(self.temporal_exp)
    }

    /// Evaluate from a frequency and an already-computed modulation.
    #[inline]
    pub fn eval_at_modulation(&self, xi: f64, sigma: f64) -> f64 {
        bracket(xi).powf(self.sobolev_exp) * bracket(sigma).powf(self.temporal_exp)
    }

    /// Range of the weight when `|xi|` ranges over `xi_abs` and `|sigma|` over `sigma_abs`.
    /// Both factors are monotone in their argument, so the extremes sit at the ends.
    pub fn range(&self, xi_abs: (f64, f64), sigma_abs: (f64, f64)) -> (f64, f64) {
        let a = [bracket(xi_abs.0).powf(self.sobolev_exp), bracket(xi_abs.1).powf(self.sobolev_exp)];
        let b = [
            bracket(sigma_abs.0).powf(self.temporal_exp),
            bracket(sigma_abs.1).powf(self.temporal_exp),
        ];
        let lo = a[0].min(a[1]) * b[0].min(b[1]);
        let hi = a[0].max(a[1]) * b[0].max(b[1]);
        (lo, hi)
    }
}
