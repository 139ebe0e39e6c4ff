// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{run_simulation, SolverConfig};
use crate::lab::fit_scaling_exponent;
use crate::spectral::FieldPair;

/// Differences below this multiple of the state size count as roundoff.
const ROUNDOFF_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Order {
    /// All differences sit at the roundoff floor (e.g. the linear flow).
    Exact,
    Fitted { slope: f64, stderr: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    /// Step sizes, coarsest first.
    pub dts: Vec<f64>,
    /// `errors[i]` is the max-norm gap between the terminal states at `dts[i]` and `dts[i + 1]`.
    pub errors: Vec<f64>,
    pub order: Order,
}

/// Halve `dt` `levels - 1` times and fit the decay of successive terminal differences.
pub fn convergence_study(base: &SolverConfig, initial: &FieldPair, levels: usize) -> Result<ConvergenceReport> {
    if levels < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: levels });
    }
    let dts: Vec<f64> = (0..levels).map(|i| base.dt / 2f64.powi(i as i32)).collect();
    let mut finals = Vec::with_capacity(levels);
    for &dt in &dts {
        let mut cfg = base.with_dt(dt);
        cfg.record_every = usize::MAX;
        finals.push(run_simulation(&cfg, initial)?.last().clone());
    }
    let errors: Vec<f64> = finals.windows(2).map(|p| p[0].max_diff(&p[1])).collect();
    let scale = finals[0].max_abs().max(f64::MIN_POSITIVE);
    let floor = ROUNDOFF_FLOOR * scale.max(1.0);
    if errors.iter().all(|&e| e <= floor) {
        return Ok(ConvergenceReport { dts, errors, order: Order::Exact });
    }
    if errors.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::NonMonotone(errors));
    }
    // fit error against 1/dt so a positive slope is the order
    let inv: Vec<(f64, f64)> = dts[..errors.len()].iter().zip(&errors).map(|(d, e)| (1.0 / d, *e)).collect();
    let (slope, stderr) = fit_scaling_exponent(&inv).or_else(|_| two_point(&inv))?;
    Ok(ConvergenceReport { dts, errors, order: Order::Fitted { slope: -slope, stderr } })
}

// The general fitter wants four points; allow the minimal three-level study.
fn two_point(pts: &[(f64, f64)]) -> Result<(f64, f64)> {
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok((sxy / sxx, f64::NAN))
}
