// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::etdrk4::Etdrk4;
use super::rhs::SpectralPair;
use crate::diagnostics::InvariantRecord;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::spectral::{FieldPair, FourierGrid};

/// Default dealiasing fraction (the 2/3 rule).
pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub params: ModelParams,
    pub grid: FourierGrid,
    pub dt: f64,
    pub t_end: f64,
    pub dealias_fraction: f64,
    pub record_every: usize,
    /// When false only the Airy flow is integrated.
    pub nonlinear: bool,
}

impl SolverConfig {
    pub fn new(params: ModelParams, grid: FourierGrid, dt: f64, t_end: f64) -> Self {
        Self {
            params,
            grid,
            dt,
            t_end,
            dealias_fraction: DEFAULT_DEALIAS,
            record_every: 1,
            nonlinear: true,
        }
    }

    pub fn with_dt(&self, dt: f64) -> Self {
        Self { dt, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidParameter(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.dt > self.t_end * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter("dt exceeds t_end".into()));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "dealias_fraction {} outside (0, 1]",
                self.dealias_fraction
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter("record_every must be positive".into()));
        }
        Ok(())
    }

    /// Number of steps; `dt` is shrunk so that an integer number of steps lands on `t_end`.
    pub fn steps(&self) -> usize {
        ((self.t_end / self.dt) - 1e-9).ceil().max(1.0) as usize
    }

    pub fn effective_dt(&self) -> f64 {
        self.t_end / self.steps() as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<FieldPair>,
    pub diagnostics: Vec<InvariantRecord>,
}

impl Trajectory {
    pub fn last(&self) -> &FieldPair {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// Integrate from `0` to `t_end` with ETDRK4.
///
/// With the nonlinearity on, the initial data is first projected onto the
/// dealiasing mask so that the discrete system is a closed Galerkin truncation.
pub fn run_simulation(config: &SolverConfig, initial: &FieldPair) -> Result<Trajectory> {
    config.validate()?;
    initial.check_finite()?;
    initial.check_grid(&config.grid)?;
    let grid = &config.grid;
    let steps = config.steps();
    let dt = config.effective_dt();
    let stepper = Etdrk4::new(
        grid,
        config.params.alpha,
        dt,
        config.nonlinear.then_some(config.dealias_fraction),
    )?;
    let mut u = SpectralPair::from_fields(initial, grid);
    if let Some(nl) = stepper.nonlinearity() {
        nl.project(&mut u);
    }

    let mut traj = Trajectory { times: Vec::new(), states: Vec::new(), diagnostics: Vec::new() };
    let record = |t: f64, u: &SpectralPair, traj: &mut Trajectory| -> Result<()> {
        let st = u.to_fields(grid);
        traj.diagnostics
            .push(InvariantRecord::measure(t, &st, grid, config.params.s, config.params.k)?);
        traj.times.push(t);
        traj.states.push(st);
        Ok(())
    };
    record(0.0, &u, &mut traj)?;
    for i in 1..=steps {
        let t = i as f64 * dt;
        u = stepper
            .step(&u)
            .map_err(|_| Error::StepRejected { time: t })?;
        if i % config.record_every == 0 || i == steps {
            record(t, &u, &mut traj)?;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::unitary_group_apply;

    fn config(alpha: f64, dt: f64, t_end: f64) -> SolverConfig {
        let g = FourierGrid::new(64, 8.0).unwrap();
        SolverConfig::new(ModelParams::for_solver(alpha), g, dt, t_end)
    }

    #[test]
    fn zero_data_stays_zero() {
        let c = config(2.0, 0.01, 0.1);
        let tr = run_simulation(&c, &FieldPair::zeros(64)).unwrap();
        assert!(tr.states.iter().all(|s| s.max_abs() == 0.0));
        assert!(tr.diagnostics.iter().all(|d| d.i1 == 0.0));
    }

    #[test]
    fn linear_run_matches_group() {
        let mut c = config(2.0, 0.01, 0.2);
        c.nonlinear = false;
        c.record_every = 5;
        let init = FieldPair::gaussian(&c.grid, 0.5, 1.0, 0.5);
        let tr = run_simulation(&c, &init).unwrap();
        assert_eq!(tr.times.len(), 5);
        for (t, st) in tr.times.iter().zip(&tr.states) {
            let v = unitary_group_apply(&init.v, *t, 1.0, &c.grid).unwrap();
            let w = unitary_group_apply(&init.w, *t, 2.0, &c.grid).unwrap();
            for j in 0..64 {
                assert!((st.v[j] - v[j]).abs() < 1e-11);
                assert!((st.w[j] - w[j]).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn times_increase_and_end_on_target() {
        let c = config(2.0, 0.03, 0.1);
        let init = FieldPair::gaussian(&c.grid, 0.5, 1.0, 0.0);
        let tr = run_simulation(&c, &init).unwrap();
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
        assert!((tr.times.last().unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_config() {
        let mut c = config(2.0, 0.01, 0.1);
        c.record_every = 0;
        assert!(run_simulation(&c, &FieldPair::zeros(64)).is_err());
        let c = config(0.0, 0.01, 0.1);
        assert!(run_simulation(&c, &FieldPair::zeros(64)).is_err());
    }
}
