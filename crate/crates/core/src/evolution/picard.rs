// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use serde::Serialize;

use super::linear::airy_symbol;
use super::rhs::{Nonlinearity, SpectralPair};
use super::simulate::{run_simulation, SolverConfig, DEFAULT_DEALIAS};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::spectral::{sobolev_norm_spectrum, FieldPair, FourierGrid};

/// Residuals below this (relative to the data norm) are treated as converged.
const RESIDUAL_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct PicardConfig {
    pub params: ModelParams,
    pub grid: FourierGrid,
    /// Number of iterates after the linear flow.
    pub n_iter: usize,
    /// Time intervals of the composite Simpson rule on `[0, delta]` (even).
    pub quadrature_steps: usize,
    pub dealias_fraction: f64,
}

impl PicardConfig {
    pub fn new(params: ModelParams, grid: FourierGrid, n_iter: usize, quadrature_steps: usize) -> Self {
        Self { params, grid, n_iter, quadrature_steps, dealias_fraction: DEFAULT_DEALIAS }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.params.delta > 0.0) {
            return Err(Error::InvalidParameter("Picard iteration needs delta > 0".into()));
        }
        if self.n_iter == 0 {
            return Err(Error::InvalidParameter("n_iter must be positive".into()));
        }
        if self.quadrature_steps < 2 || self.quadrature_steps % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "quadrature_steps must be even and at least 2, got {}",
                self.quadrature_steps
            )));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::InvalidParameter("dealias_fraction outside (0, 1]".into()));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let m = self.quadrature_steps;
        (0..=m).map(|j| self.params.delta * j as f64 / m as f64).collect()
    }
}

/// One Duhamel iterate sampled on the quadrature nodes.
#[derive(Debug, Clone, Serialize)]
pub struct PicardIterate {
    pub times: Vec<f64>,
    pub states: Vec<FieldPair>,
    /// Sup-in-time `H^s x H^k` distance to the previous iterate (`None` for the linear flow).
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PicardReport {
    pub iterates: Vec<PicardIterate>,
    pub residuals: Vec<f64>,
    /// `residuals[i + 1] / residuals[i]`; `0` once the previous residual is at the roundoff floor.
    pub ratios: Vec<f64>,
    /// True when every ratio is below one.
    pub contracting: bool,
}

impl PicardReport {
    pub fn final_state(&self) -> &FieldPair {
        self.iterates.last().and_then(|it| it.states.last()).expect("at least the linear iterate")
    }
}

/// Iterate the Duhamel maps on `[0, delta]` starting from the free evolution.
///
/// A ratio of at least one is a measurement, not an error.
pub fn picard_iterate(phi: &[f64], psi: &[f64], config: &PicardConfig) -> Result<PicardReport> {
    config.validate()?;
    let data = FieldPair::new(phi.to_vec(), psi.to_vec())?;
    data.check_grid(&config.grid)?;
    let grid = &config.grid;
    let nl = Nonlinearity::new(grid, config.dealias_fraction);
    let mut u0 = SpectralPair::from_fields(&data, grid);
    nl.project(&mut u0);

    let times = config.times();
    let alpha = config.params.alpha;
    let (s, k) = (config.params.s, config.params.k);
    let floor = RESIDUAL_FLOOR * product_norm(&u0, s, k, grid).max(1.0);

    let mut current: Vec<SpectralPair> = times.iter().map(|&t| free_flow(&u0, t, alpha, grid)).collect();
    let mut iterates = vec![to_iterate(&times, &current, grid, None)];
    let mut residuals = Vec::with_capacity(config.n_iter);
    for _ in 0..config.n_iter {
        let next = duhamel(&u0, &current, &times, alpha, &nl);
        let r = current
            .iter()
            .zip(&next)
            .map(|(a, b)| product_norm(&a.axpy(-1.0, b), s, k, grid))
            .fold(0.0, f64::max);
        if !r.is_finite() {
            return Err(Error::NonFinite("Picard residual"));
        }
        residuals.push(r);
        iterates.push(to_iterate(&times, &next, grid, Some(r)));
        current = next;
    }
    let ratios: Vec<f64> = residuals
        .windows(2)
        .map(|p| if p[0] > floor { p[1] / p[0] } else { 0.0 })
        .collect();
    let contracting = ratios.iter().all(|&q| q < 1.0);
    Ok(PicardReport { iterates, residuals, ratios, contracting })
}

fn product_norm(u: &SpectralPair, s: f64, k: f64, grid: &FourierGrid) -> f64 {
    sobolev_norm_spectrum(&u.v, s, grid).hypot(sobolev_norm_spectrum(&u.w, k, grid))
}

fn phase(grid: &FourierGrid, t: f64, c: f64) -> Vec<Complex64> {
    (0..grid.n()).map(|j| Complex64::from_polar(1.0, t * airy_symbol(grid, j, c))).collect()
}

fn free_flow(u0: &SpectralPair, t: f64, alpha: f64, grid: &FourierGrid) -> SpectralPair {
    let pv = phase(grid, t, 1.0);
    let pw = phase(grid, t, alpha);
    SpectralPair {
        v: u0.v.iter().zip(&pv).map(|(a, b)| a * b).collect(),
        w: u0.w.iter().zip(&pw).map(|(a, b)| a * b).collect(),
    }
}

// u(t) = U(t) [u0 + int_0^t U(-t') N(u(t')) dt'], with the integral accumulated
// by composite Simpson on even nodes and a three-point rule on odd ones.
fn duhamel(u0: &SpectralPair, prev: &[SpectralPair], times: &[f64], alpha: f64, nl: &Nonlinearity) -> Vec<SpectralPair> {
    let grid = nl.grid();
    let n = grid.n();
    let h = times[1] - times[0];
    let integrand: Vec<SpectralPair> = prev
        .iter()
        .zip(times)
        .map(|(u, &t)| free_flow(&nl.eval(u), -t, alpha, grid))
        .collect();
    let m = times.len() - 1;
    let mut cumulative = vec![SpectralPair::zeros(n); m + 1];
    for j in 1..=m {
        let (f0, f1) = (&integrand[j - 1], &integrand[j]);
        cumulative[j] = if j % 2 == 0 {
            let fm = &integrand[j - 2];
            cumulative[j - 2]
                .axpy(h / 3.0, fm)
                .axpy(4.0 * h / 3.0, f0)
                .axpy(h / 3.0, f1)
        } else {
            let f2 = &integrand[j + 1];
            cumulative[j - 1]
                .axpy(5.0 * h / 12.0, f0)
                .axpy(8.0 * h / 12.0, f1)
                .axpy(-h / 12.0, f2)
        };
    }
    cumulative
        .iter()
        .zip(times)
        .map(|(acc, &t)| free_flow(&u0.axpy(1.0, acc), t, alpha, grid))
        .collect()
}

fn to_iterate(times: &[f64], states: &[SpectralPair], grid: &FourierGrid, residual: Option<f64>) -> PicardIterate {
    PicardIterate {
        times: times.to_vec(),
        states: states.iter().map(|u| u.to_fields(grid)).collect(),
        residual,
    }
}

/// Agreement between the converged Picard iterate and the time stepper at `t = delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverAgreement {
    /// Max-norm gap between the two terminal states.
    pub gap: f64,
    /// Gap between quadrature resolutions `M` and `M / 2`.
    pub picard_self_error: f64,
    /// Gap between step sizes `dt` and `dt / 2`.
    pub solver_self_error: f64,
    /// Roundoff allowance added to the combined self-error.
    pub floor: f64,
    pub consistent: bool,
}

/// Compare Picard against [`run_simulation`] within `factor` times the larger self-error.
pub fn picard_vs_solver(
    phi: &[f64],
    psi: &[f64],
    config: &PicardConfig,
    dt: f64,
    factor: f64,
) -> Result<SolverAgreement> {
    let fine = picard_iterate(phi, psi, config)?;
    let coarse_cfg = PicardConfig { quadrature_steps: config.quadrature_steps / 2, ..config.clone() };
    let coarse_cfg = if coarse_cfg.quadrature_steps % 2 == 0 {
        coarse_cfg
    } else {
        PicardConfig { quadrature_steps: coarse_cfg.quadrature_steps + 1, ..coarse_cfg }
    };
    let coarse = picard_iterate(phi, psi, &coarse_cfg)?;

    let data = FieldPair::new(phi.to_vec(), psi.to_vec())?;
    let mut solver = SolverConfig::new(config.params, config.grid.clone(), dt, config.params.delta);
    solver.dealias_fraction = config.dealias_fraction;
    solver.record_every = usize::MAX;
    let a = run_simulation(&solver, &data)?;
    let b = run_simulation(&solver.with_dt(dt / 2.0), &data)?;

    let p = fine.final_state();
    let gap = p.max_diff(a.last());
    let picard_self_error = p.max_diff(coarse.final_state());
    let solver_self_error = a.last().max_diff(b.last());
    let floor = 1e-13 * data.max_abs().max(1.0);
    let consistent = gap <= factor * (picard_self_error.max(solver_self_error) + floor);
    Ok(SolverAgreement { gap, picard_self_error, solver_self_error, floor, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(alpha: f64, n_iter: usize) -> PicardConfig {
        let g = FourierGrid::new(64, 10.0).unwrap();
        PicardConfig::new(ModelParams::for_solver(alpha).with_delta(0.1), g, n_iter, 32)
    }

    #[test]
    fn zero_data_is_fixed_point() {
        let c = cfg(2.0, 3);
        let z = vec![0.0; 64];
        let rep = picard_iterate(&z, &z, &c).unwrap();
        assert_eq!(rep.residuals, vec![0.0; 3]);
        assert!(rep.contracting);
    }

    #[test]
    fn decoupled_when_psi_vanishes() {
        let c = cfg(2.0, 3);
        let phi = c.grid.sample(|x| (-x * x).exp());
        let rep = picard_iterate(&phi, &[0.0; 64], &c).unwrap();
        assert!(rep.residuals.iter().all(|&r| r == 0.0));
        let first = &rep.iterates[0].states;
        for it in &rep.iterates[1..] {
            for (a, b) in it.states.iter().zip(first) {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn cumulative_rule_is_exact_for_quadratics() {
        // odd nodes use a three-point rule, exact up to degree two
        let c = cfg(2.0, 1);
        let times = c.times();
        let h = times[1];
        let f = [1.0, 2.0, -1.0, 0.0];
        let poly = |t: f64| f[0] + f[1] * t + f[2] * t * t + f[3] * t * t * t;
        let anti = |t: f64| f[0] * t + f[1] * t * t / 2.0 + f[2] * t.powi(3) / 3.0 + f[3] * t.powi(4) / 4.0;
        let vals: Vec<f64> = times.iter().map(|&t| poly(t)).collect();
        let mut acc = vec![0.0; vals.len()];
        for j in 1..vals.len() {
            acc[j] = if j % 2 == 0 {
                acc[j - 2] + h / 3.0 * (vals[j - 2] + 4.0 * vals[j - 1] + vals[j])
            } else {
                acc[j - 1] + h / 12.0 * (5.0 * vals[j - 1] + 8.0 * vals[j] - vals[j + 1])
            };
        }
        for (a, &t) in acc.iter().zip(&times) {
            assert!((a - anti(t)).abs() < 1e-15, "{a} vs {}", anti(t));
        }
    }

    #[test]
    fn small_data_contracts() {
        let c = cfg(2.0, 5);
        let phi = c.grid.sample(|x| 0.3 * (-x * x / 2.0).exp());
        let psi = c.grid.sample(|x| 0.3 * (-(x - 0.5).powi(2) / 2.0).exp());
        let rep = picard_iterate(&phi, &psi, &c).unwrap();
        assert!(rep.contracting);
        assert!(rep.ratios.iter().all(|&q| q <= 0.5), "{:?}", rep.ratios);
    }

    #[test]
    fn rejects_odd_quadrature() {
        let mut c = cfg(2.0, 1);
        c.quadrature_steps = 7;
        assert!(picard_iterate(&[0.0; 64], &[0.0; 64], &c).is_err());
    }
}
