// SPDX-License-Identifier: Apache-2.0

use super::linear::unitary_group_apply_spectrum;
use super::rhs::{Nonlinearity, SpectralPair};
use crate::error::{Error, Result};

/// One Strang step: half Airy flow, an RK4 step of the nonlinear part, half Airy flow.
///
/// Second order in `dt`; kept as an independent cross-check of [`super::Etdrk4`].
pub fn step_split(u: &SpectralPair, dt: f64, alpha: f64, nl: &Nonlinearity) -> Result<SpectralPair> {
    let grid = nl.grid();
    let half = |mut s: SpectralPair| {
        unitary_group_apply_spectrum(&mut s.v, 0.5 * dt, 1.0, grid);
        unitary_group_apply_spectrum(&mut s.w, 0.5 * dt, alpha, grid);
        s
    };
    let a = half(u.clone());
    let k1 = nl.eval(&a);
    let k2 = nl.eval(&a.axpy(0.5 * dt, &k1));
    let k3 = nl.eval(&a.axpy(0.5 * dt, &k2));
    let k4 = nl.eval(&a.axpy(dt, &k3));
    let b = a
        .axpy(dt / 6.0, &k1)
        .axpy(dt / 3.0, &k2)
        .axpy(dt / 3.0, &k3)
        .axpy(dt / 6.0, &k4);
    let out = half(b);
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::NonFinite("split step"))
    }
}
