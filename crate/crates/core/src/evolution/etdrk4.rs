// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use num_complex::Complex64;

use super::linear::airy_symbol;
use super::rhs::{Nonlinearity, SpectralPair};
use crate::error::{Error, Result};
use crate::spectral::{FieldPair, FourierGrid};

const CONTOUR_POINTS: usize = 32;

/// Per-mode ETDRK4 weights for one diagonal linear operator.
#[derive(Debug, Clone)]
struct Coefficients {
    e: Vec<Complex64>,
    e2: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

impl Coefficients {
    // Contour means over a unit circle around h*L avoid the cancellation in
    // the phi-functions near zero.
    fn new(grid: &FourierGrid, c: f64, dt: f64) -> Self {
        let n = grid.n();
        let mut out = Self {
            e: Vec::with_capacity(n),
            e2: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
        };
        let roots: Vec<Complex64> = (0..CONTOUR_POINTS)
            .map(|j| Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / CONTOUR_POINTS as f64))
            .collect();
        let m = CONTOUR_POINTS as f64;
        for j in 0..n {
            let hl = Complex64::new(0.0, dt * airy_symbol(grid, j, c));
            out.e.push(hl.exp());
            out.e2.push((hl / 2.0).exp());
            let (mut q, mut f1, mut f2, mut f3) = (Complex64::default(), Complex64::default(), Complex64::default(), Complex64::default());
            for r in &roots {
                let z = hl + r;
                let ez = z.exp();
                let z3 = z * z * z;
                q += ((z / 2.0).exp() - 1.0) / z;
                f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
                f2 += (2.0 + z + ez * (z - 2.0)) / z3;
                f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
            }
            out.q.push(dt * q / m);
            out.f1.push(dt * f1 / m);
            out.f2.push(dt * f2 / m);
            out.f3.push(dt * f3 / m);
        }
        out
    }
}

/// Fourth-order exponential time differencing (Kassam and Trefethen) for the
/// coupled system with linear part `diag(i xi^3, i alpha xi^3)`.
#[derive(Debug, Clone)]
pub struct Etdrk4 {
    dt: f64,
    lin_v: Coefficients,
    lin_w: Coefficients,
    nonlinear: Option<Nonlinearity>,
}

impl Etdrk4 {
    /// `dealias_fraction = None` switches the nonlinearity off (pure Airy flow).
    pub fn new(grid: &FourierGrid, alpha: f64, dt: f64, dealias_fraction: Option<f64>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter("alpha must be finite".into()));
        }
        if let Some(f) = dealias_fraction {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::InvalidParameter(format!("dealias fraction {f} outside (0, 1]")));
            }
        }
        Ok(Self {
            dt,
            lin_v: Coefficients::new(grid, 1.0, dt),
            lin_w: Coefficients::new(grid, alpha, dt),
            nonlinear: dealias_fraction.map(|f| Nonlinearity::new(grid, f)),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn nonlinearity(&self) -> Option<&Nonlinearity> {
        self.nonlinear.as_ref()
    }

    /// Advance the spectral state by one step.
    pub fn step(&self, u: &SpectralPair) -> Result<SpectralPair> {
        let next = match &self.nonlinear {
            None => SpectralPair {
                v: mul(&self.lin_v.e, &u.v),
                w: mul(&self.lin_w.e, &u.w),
            },
            Some(nl) => {
                let nu = nl.eval(u);
                let a = stage(u, &nu, &self.lin_v.e2, &self.lin_w.e2, &self.lin_v.q, &self.lin_w.q);
                let na = nl.eval(&a);
                let b = stage(u, &na, &self.lin_v.e2, &self.lin_w.e2, &self.lin_v.q, &self.lin_w.q);
                let nb = nl.eval(&b);
                let two_nb_minus_nu = nb.axpy(-0.5, &nu);
                let c = SpectralPair {
                    v: combine(&self.lin_v.e2, &a.v, &self.lin_v.q, &two_nb_minus_nu.v, 2.0),
                    w: combine(&self.lin_w.e2, &a.w, &self.lin_w.q, &two_nb_minus_nu.w, 2.0),
                };
                let nc = nl.eval(&c);
                SpectralPair {
                    v: finish(&self.lin_v, &u.v, &nu.v, &na.v, &nb.v, &nc.v),
                    w: finish(&self.lin_w, &u.w, &nu.w, &na.w, &nb.w, &nc.w),
                }
            }
        };
        if next.is_finite() {
            Ok(next)
        } else {
            Err(Error::NonFinite("ETDRK4 step"))
        }
    }
}

fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn combine(e: &[Complex64], u: &[Complex64], q: &[Complex64], n: &[Complex64], scale: f64) -> Vec<Complex64> {
    (0..u.len()).map(|j| e[j] * u[j] + scale * q[j] * n[j]).collect()
}

fn stage(
    u: &SpectralPair,
    n: &SpectralPair,
    ev: &[Complex64],
    ew: &[Complex64],
    qv: &[Complex64],
    qw: &[Complex64],
) -> SpectralPair {
    SpectralPair { v: combine(ev, &u.v, qv, &n.v, 1.0), w: combine(ew, &u.w, qw, &n.w, 1.0) }
}

fn finish(
    c: &Coefficients,
    u: &[Complex64],
    nu: &[Complex64],
    na: &[Complex64],
    nb: &[Complex64],
    nc: &[Complex64],
) -> Vec<Complex64> {
    (0..u.len())
        .map(|j| c.e[j] * u[j] + c.f1[j] * nu[j] + 2.0 * c.f2[j] * (na[j] + nb[j]) + c.f3[j] * nc[j])
        .collect()
}

/// One ETDRK4 step on physical samples. Builds the coefficient tables on every
/// call; use [`Etdrk4`] directly inside loops.
pub fn step_etdrk4(
    state: &FieldPair,
    grid: &FourierGrid,
    alpha: f64,
    dt: f64,
    dealias_fraction: f64,
) -> Result<FieldPair> {
    state.check_finite()?;
    state.check_grid(grid)?;
    let stepper = Etdrk4::new(grid, alpha, dt, Some(dealias_fraction))?;
    Ok(stepper.step(&SpectralPair::from_fields(state, grid))?.to_fields(grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contour_weights_match_series_at_zero() {
        // phi-functions at L = 0: Q = h/2, f1 = h/6, f2 = h/6, f3 = h/6
        let g = FourierGrid::new(16, PI).unwrap();
        let c = Coefficients::new(&g, 1.0, 0.1);
        assert!((c.q[0] - Complex64::new(0.05, 0.0)).norm() < 1e-14);
        for f in [&c.f1, &c.f2, &c.f3] {
            assert!((f[0] - Complex64::new(0.1 / 6.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn contour_weights_match_closed_form_for_large_symbol() {
        let g = FourierGrid::new(16, PI).unwrap();
        let dt = 0.05;
        let c = Coefficients::new(&g, 1.0, dt);
        let j = 5;
        let l = Complex64::new(0.0, 125.0);
        let z = l * dt;
        let f1 = dt * (-4.0 - z + z.exp() * (4.0 - 3.0 * z + z * z)) / (z * z * z);
        let q = dt * ((z / 2.0).exp() - 1.0) / z;
        assert!((c.f1[j] - f1).norm() < 1e-13);
        assert!((c.q[j] - q).norm() < 1e-13);
    }

    #[test]
    fn linear_mode_is_exact() {
        let g = FourierGrid::new(32, PI).unwrap();
        let st = FieldPair::from_fns(&g, |x| (3.0 * x).sin(), |x| (2.0 * x).cos());
        let stepper = Etdrk4::new(&g, 2.0, 0.013, None).unwrap();
        let mut u = SpectralPair::from_fields(&st, &g);
        for _ in 0..10 {
            u = stepper.step(&u).unwrap();
        }
        let out = u.to_fields(&g);
        let t = 0.13;
        let ev = g.sample(|x| (3.0 * x + 27.0 * t).sin());
        let ew = g.sample(|x| (2.0 * x + 16.0 * t).cos());
        for j in 0..32 {
            assert!((out.v[j] - ev[j]).abs() < 1e-12);
            assert!((out.w[j] - ew[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_step() {
        let g = FourierGrid::new(16, PI).unwrap();
        assert!(Etdrk4::new(&g, 1.0, 0.0, None).is_err());
        assert!(Etdrk4::new(&g, 1.0, 0.1, Some(1.5)).is_err());
    }
}
