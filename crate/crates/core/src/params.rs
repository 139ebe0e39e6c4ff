// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar analysis parameters shared by the solver and the estimate lab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Dispersion ratio of the `w` equation.
    pub alpha: f64,
    /// Sobolev index of `v`.
    pub s: f64,
    /// Sobolev index of `w`.
    pub k: f64,
    /// Temporal Bourgain exponent.
    pub b: f64,
    /// Dual temporal exponent.
    pub b_prime: f64,
    pub eps: f64,
    /// Local existence time.
    pub delta: f64,
    /// Set when `alpha == 1` is used on purpose (decoupled-dispersion solver checks).
    #[serde(default)]
    pub validation_mode: bool,
}

impl ModelParams {
    /// The trilinear-estimate preset: `b = 1/2 + eps`, `b' = -1/2 + 2 eps`.
    pub fn trilinear_preset(alpha: f64, s: f64, k: f64, eps: f64) -> Result<Self> {
        let p = Self {
            alpha,
            s,
            k,
            b: 0.5 + eps,
            b_prime: -0.5 + 2.0 * eps,
            eps,
            delta: 0.1,
            validation_mode: false,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters for a solver run; only `alpha` and `delta` matter there.
    pub fn for_solver(alpha: f64) -> Self {
        Self {
            alpha,
            s: 0.0,
            k: 0.0,
            b: 0.5 + 0.1,
            b_prime: -0.5 + 0.2,
            eps: 0.1,
            delta: 0.1,
            validation_mode: alpha == 1.0,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_indices(mut self, s: f64, k: f64) -> Self {
        self.s = s;
        self.k = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.s, self.k, self.b, self.b_prime, self.eps, self.delta];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite model parameter".into()));
        }
        if self.alpha == 0.0 {
            return Err(Error::InvalidParameter("alpha = 0 decouples the dispersion".into()));
        }
        if self.alpha == 1.0 && !self.validation_mode {
            return Err(Error::InvalidParameter(
                "alpha = 1 requires validation_mode".into(),
            ));
        }
        if self.eps <= 0.0 {
            return Err(Error::InvalidParameter("eps must be positive".into()));
        }
        if self.delta < 0.0 {
            return Err(Error::InvalidParameter("delta must be non-negative".into()));
        }
        Ok(())
    }

    /// Upper end of the admissible `eps` window for the trilinear estimates.
    pub fn eps_window(s: f64) -> f64 {
        ((2.0 * s + 1.0) / 15.0).min(1.0 / 6.0)
    }

    /// True when `0 < eps < min{(2s+1)/15, 1/6}`.
    pub fn eps_in_window(&self) -> bool {
        self.eps > 0.0 && self.eps < Self::eps_window(self.s)
    }
}
