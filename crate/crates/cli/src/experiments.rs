// SPDX-License-Identifier: Apache-2.0

//! The registered experiments. Each returns tables, a JSON summary, threshold
//! checks and plot specs; writing to disk happens in the runner.

use mkdv_core::diagnostics::{convergence_study, invariant_i1, max_drift, relative_drift, Order};
use mkdv_core::evolution::{picard_iterate, picard_vs_solver, run_simulation, PicardConfig, SolverConfig};
use mkdv_core::lab::{
    build_counterexample, c3_derivative_norm, estimate_ratio, expected_slope, integral_check, rect_convolution_norm,
    resonance_residual, solve_resonance_constants, sup_integral_grid, verify_estimate_region, FreqRect, LemmaCase,
    RatioEntry, RatioSeries, Verdict, DEFAULT_R,
};
use mkdv_core::{FieldPair, FourierGrid, ModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::*;
use crate::error::CliError;
use crate::output::{Cell, Table};
use crate::plot::PlotSpec;

/// Default slope tolerance when `[expect]` gives a target but no tolerance.
pub const DEFAULT_SLOPE_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: String,
    pub requirement: String,
    pub pass: bool,
}

impl Check {
    fn at_most(name: &str, measured: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            measured: format!("{measured:.6e}"),
            requirement: format!("<= {limit:e}"),
            pass: measured <= limit,
        }
    }

    fn near(name: &str, measured: f64, target: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            measured: format!("{measured:.6}"),
            requirement: format!("{target} +- {tol}"),
            pass: (measured - target).abs() <= tol,
        }
    }
}

pub struct RunOutput {
    pub tables: Vec<Table>,
    pub results: Value,
    pub checks: Vec<Check>,
    pub plots: Vec<PlotSpec>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let expect = cfg.expect.clone().unwrap_or_default();
    let p = &cfg.params;
    match cfg.experiment {
        ExperimentKind::Simulate => simulate(p, cfg.simulate.as_ref().unwrap(), &expect),
        ExperimentKind::Invariants => invariants(p, cfg.invariants.as_ref().unwrap(), &expect),
        ExperimentKind::Picard => picard(p, cfg.picard.as_ref().unwrap(), &expect),
        ExperimentKind::EstimateRegion => region(p, cfg.estimate_region.as_ref().unwrap(), &expect),
        ExperimentKind::Counterexample => counterexample(p, cfg.counterexample.as_ref().unwrap(), &expect),
        ExperimentKind::C3Derivative => c3(p, cfg.c3_derivative.as_ref().unwrap(), &expect),
        ExperimentKind::LemmaCheck => lemmas(cfg.seed, cfg.lemma_check.as_ref().unwrap(), &expect),
        ExperimentKind::Convnorm => convnorm(cfg.convnorm.as_ref().unwrap(), &expect),
        ExperimentKind::Resonance => resonance(cfg.resonance.as_ref().unwrap(), &expect),
    }
}

fn make_grid(g: &GridSettings) -> Result<FourierGrid, CliError> {
    Ok(FourierGrid::new(g.n, g.half_length)?)
}

fn initial(grid: &FourierGrid, init: &InitialData) -> FieldPair {
    match *init {
        InitialData::Zero => FieldPair::from_fns(grid, |_| 0.0, |_| 0.0),
        InitialData::Gaussian { amplitude, width, shift } => FieldPair::gaussian(grid, amplitude, width, shift),
        InitialData::Sech { amplitude, width, shift } => {
            let f = move |x: f64| amplitude / (x / width).cosh();
            FieldPair::from_fns(grid, f, |x| f(x - shift))
        }
    }
}

fn solver_config(
    p: &ModelParams,
    grid: FourierGrid,
    dt: f64,
    t_end: f64,
    record_every: usize,
    dealias: Option<f64>,
) -> SolverConfig {
    let mut c = SolverConfig::new(*p, grid, dt, t_end);
    c.record_every = record_every;
    if let Some(d) = dealias {
        c.dealias_fraction = d;
    }
    c
}

fn drift_checks(e: &Expectations, d1: f64, d2: f64) -> Vec<Check> {
    let mut out = Vec::new();
    if let Some(l) = e.max_drift_i1 {
        out.push(Check::at_most("max_drift_i1", d1, l));
    }
    if let Some(l) = e.max_drift_i2 {
        out.push(Check::at_most("max_drift_i2", d2, l));
    }
    out
}

fn simulate(p: &ModelParams, s: &SimulateSettings, e: &Expectations) -> Result<RunOutput, CliError> {
    let grid = make_grid(&s.grid)?;
    let mut cfg = solver_config(p, grid.clone(), s.dt, s.t_end, s.record_every, s.dealias_fraction);
    cfg.nonlinear = s.nonlinear;
    let tr = run_simulation(&cfg, &initial(&grid, &s.initial))?;

    let mut inv = Table::new("invariants", &["time", "i1", "i2", "hs_v", "hk_w"]);
    for r in &tr.diagnostics {
        inv.push(vec![r.time.into(), r.i1.into(), r.i2.into(), r.hs_v.into(), r.hk_w.into()]);
    }
    let mut tables = vec![inv];
    if s.write_fields {
        let xs = grid.x();
        let mut f = Table::new("fields", &["time", "x", "v", "w"]);
        for (t, st) in tr.times.iter().zip(&tr.states) {
            for ((x, v), w) in xs.iter().zip(&st.v).zip(&st.w) {
                f.push(vec![(*t).into(), (*x).into(), (*v).into(), (*w).into()]);
            }
        }
        tables.push(f);
    }
    let (d1, d2) = max_drift(&tr.diagnostics);
    let last = tr.last();
    let results = json!({
        "steps": cfg.steps(),
        "effective_dt": cfg.effective_dt(),
        "samples": tr.times.len(),
        "final_time": tr.times.last().copied().unwrap_or(0.0),
        "max_drift_i1": d1,
        "max_drift_i2": d2,
        "final_max_abs": last.max_abs(),
    });
    Ok(RunOutput {
        tables,
        results,
        checks: drift_checks(e, d1, d2),
        plots: vec![PlotSpec::linear("invariants", "time", &["i1", "i2"], "conserved quantities")],
    })
}

fn invariants(p: &ModelParams, s: &InvariantSettings, e: &Expectations) -> Result<RunOutput, CliError> {
    let grid = make_grid(&s.grid)?;
    let cfg = solver_config(p, grid.clone(), s.dt, s.t_end, s.record_every, s.dealias_fraction);
    let init = initial(&grid, &s.initial);
    let tr = run_simulation(&cfg, &init)?;
    let first = tr.diagnostics.first().cloned();
    let mut t = Table::new("drift", &["time", "i1", "i2", "drift_i1", "drift_i2"]);
    for r in &tr.diagnostics {
        let f = first.as_ref().unwrap();
        t.push(vec![
            r.time.into(),
            r.i1.into(),
            r.i2.into(),
            relative_drift(f.i1, r.i1).into(),
            relative_drift(f.i2, r.i2).into(),
        ]);
    }
    let (d1, d2) = max_drift(&tr.diagnostics);
    let mut checks = drift_checks(e, d1, d2);
    let mut tables = vec![t];
    let mut plots = vec![PlotSpec::linear("drift", "time", &["drift_i1", "drift_i2"], "relative drift")];
    let mut results = json!({ "max_drift_i1": d1, "max_drift_i2": d2 });

    if s.convergence_levels >= 3 {
        let mut base = cfg.clone();
        base.record_every = usize::MAX;
        let rep = convergence_study(&base, &init, s.convergence_levels)?;
        let mut c = Table::new("convergence", &["dt", "gap"]);
        for (dt, g) in rep.dts.iter().zip(&rep.errors) {
            c.push(vec![(*dt).into(), (*g).into()]);
        }
        tables.push(c);
        plots.push(PlotSpec::log_log("convergence", "dt", &["gap"], "self-convergence gaps"));
        results["convergence"] = serde_json::to_value(rep.order).expect("serializable");
        if e.slope.is_some() || e.slope_tolerance.is_some() {
            let target = e.slope.unwrap_or(4.0);
            let tol = e.slope_tolerance.unwrap_or(DEFAULT_SLOPE_TOLERANCE);
            checks.push(match rep.order {
                Order::Fitted { slope, .. } => Check::near("order", slope, target, tol),
                Order::Exact => Check {
                    name: "order".into(),
                    measured: "gaps at roundoff".into(),
                    requirement: format!("{target} +- {tol}"),
                    pass: false,
                },
            });
        }
    }
    Ok(RunOutput { tables, results, checks, plots })
}

fn picard(p: &ModelParams, s: &PicardSettings, e: &Expectations) -> Result<RunOutput, CliError> {
    let grid = make_grid(&s.grid)?;
    let mut data = initial(&grid, &s.initial);
    if let Some(target) = s.l2_norm {
        let norm = invariant_i1(&data, &grid)?.sqrt();
        if norm == 0.0 {
            return Err(CliError::Validation("cannot rescale zero data to a nonzero norm".into()));
        }
        data = data.scaled(target / norm);
    }
    let cfg = PicardConfig::new(*p, grid, s.iterations, s.quadrature_steps);
    let rep = picard_iterate(&data.v, &data.w, &cfg)?;
    let mut t = Table::new("residuals", &["iteration", "residual", "ratio"]);
    for (i, r) in rep.residuals.iter().enumerate() {
        let ratio = if i == 0 { Cell::Text(String::new()) } else { rep.ratios[i - 1].into() };
        t.push(vec![(i + 1).into(), (*r).into(), ratio]);
    }
    let worst = rep.ratios.iter().copied().fold(0.0, f64::max);
    let mut results = json!({
        "residuals": rep.residuals,
        "ratios": rep.ratios,
        "max_ratio": worst,
        "contracting": rep.contracting,
    });
    let mut checks = Vec::new();
    if let Some(l) = e.max_ratio {
        checks.push(Check::at_most("max_ratio", worst, l));
    }
    if let Some(dt) = s.compare_dt {
        let a = picard_vs_solver(&data.v, &data.w, &cfg, dt, s.compare_factor)?;
        results["solver_agreement"] = serde_json::to_value(a).expect("serializable");
        let allowance = s.compare_factor * (a.picard_self_error.max(a.solver_self_error) + a.floor);
        checks.push(Check::at_most("solver_gap", a.gap, allowance));
    }
    Ok(RunOutput {
        tables: vec![t],
        results,
        checks,
        plots: vec![PlotSpec::log_log("residuals", "iteration", &["residual"], "Picard residuals")],
    })
}

fn entry_row(e: &RatioEntry) -> Vec<Cell> {
    vec![e.n.into(), e.lhs.into(), e.rhs.into(), e.ratio.into(), e.ratio_lo.into(), e.ratio_hi.into()]
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::HoldsConsistent => "holds_consistent",
        Verdict::Fails { .. } => "fails",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn region(p: &ModelParams, s: &RegionSettings, e: &Expectations) -> Result<RunOutput, CliError> {
    let mut series = Table::new("region", &["s", "k", "n", "lhs", "rhs", "ratio", "ratio_lo", "ratio_hi"]);
    let mut verdicts =
        Table::new("verdicts", &["s", "k", "in_region", "verdict", "slope", "stderr", "expected_slope", "families"]);
    let mut out = Vec::new();
    let mut checks = Vec::new();
    for &[sv, kv] in &s.points {
        let v = verify_estimate_region(sv, kv, p, s.side, &s.n)?;
        for en in &v.series.entries {
            let mut row = vec![sv.into(), kv.into()];
            row.extend(entry_row(en));
            series.push(row);
        }
        let fams: Vec<String> = v.families.iter().map(|f| format!("{f:?}")).collect();
        verdicts.push(vec![
            sv.into(),
            kv.into(),
            (if v.in_region { "yes" } else { "no" }).into(),
            verdict_name(&v.verdict).into(),
            v.series.fitted_slope.into(),
            v.series.slope_stderr.into(),
            v.expected_slope.map_or(Cell::Text(String::new()), Cell::Num),
            fams.join(" ").into(),
        ]);
        if let Some(want) = &e.verdict {
            let got = verdict_name(&v.verdict);
            checks.push(Check {
                name: format!("verdict ({sv},{kv})"),
                measured: format!("{got} (slope {:.4})", v.series.fitted_slope),
                requirement: want.clone(),
                pass: got == want,
            });
        }
        out.push(json!({
            "s": sv,
            "k": kv,
            "in_region": v.in_region,
            "verdict": v.verdict,
            "slope": v.series.fitted_slope,
            "stderr": v.series.slope_stderr,
            "expected_slope": v.expected_slope,
            "families": v.families,
            "family_slopes": v.family_slopes,
        }));
    }
    Ok(RunOutput {
        tables: vec![series, verdicts],
        results: json!({ "side": s.side, "alpha": p.alpha, "points": out }),
        checks,
        plots: vec![PlotSpec::log_log("region", "n", &["ratio"], "probe or family ratios")],
    })
}

fn slope_check(e: &Expectations, slope: f64, predicted: f64) -> Vec<Check> {
    if e.slope.is_none() && e.slope_tolerance.is_none() {
        return Vec::new();
    }
    let target = e.slope.unwrap_or(predicted);
    vec![Check::near("slope", slope, target, e.slope_tolerance.unwrap_or(DEFAULT_SLOPE_TOLERANCE))]
}

fn counterexample(p: &ModelParams, s: &CounterexampleSettings, e: &Expectations) -> Result<RunOutput, CliError> {
    let mut t = Table::new("series", &["n", "lhs", "rhs", "ratio", "ratio_lo", "ratio_hi", "frozen_error"]);
    let mut entries = Vec::new();
    let mut c_alpha = Vec::new();
    for &n in &s.n {
        let fam = build_counterexample(s.family, p, n, s.r)?;
        let rep = estimate_ratio(&fam)?;
        let en = RatioEntry { n, lhs: rep.lhs, rhs: rep.rhs, ratio: rep.ratio, ratio_lo: rep.ratio_lo, ratio_hi: rep.ratio_hi };
        let mut row = entry_row(&en);
        row.push(rep.frozen_error.into());
        t.push(row);
        entries.push(en);
        c_alpha.push(fam.c_alpha);
    }
    let fit = RatioSeries::from_entries(format!("{:?}", s.family), entries)?;
    let predicted = expected_slope(s.family, p, s.r.unwrap_or(DEFAULT_R));
    let results = json!({
        "family": s.family,
        "slope": fit.fitted_slope,
        "stderr": fit.slope_stderr,
        "expected_slope": predicted,
        "c_alpha": c_alpha,
    });
    Ok(RunOutput {
        tables: vec![t],
        results,
        checks: slope_check(e, fit.fitted_slope, predicted),
        plots: vec![PlotSpec::log_log("series", "n", &["ratio", "ratio_lo", "ratio_hi"], format!("{:?} ratio", s.family))],
    })
}

fn c3(p: &ModelParams, s: &C3Settings, e: &Expectations) -> Result<RunOutput, CliError> {
    let mut t = Table::new(
        "series",
        &["n", "lhs", "rhs", "ratio", "ratio_lo", "ratio_hi", "lhs_lo", "lhs_hi", "phase_bound"],
    );
    let mut entries = Vec::new();
    let mut predicted = 0.0;
    for &n in &s.n {
        let r = c3_derivative_norm(s.family, s.component, p, n, s.t, s.eps_loc)?;
        predicted = r.setup.expected_slope;
        let en = RatioEntry { n, lhs: r.lhs, rhs: r.rhs, ratio: r.ratio, ratio_lo: r.ratio_lo, ratio_hi: r.ratio_hi };
        let mut row = entry_row(&en);
        row.extend([r.lhs_lo.into(), r.lhs_hi.into(), r.phase_bound.into()]);
        t.push(row);
        entries.push(en);
    }
    let fit = RatioSeries::from_entries("c3", entries)?;
    let results = json!({
        "family": s.family,
        "component": s.component,
        "slope": fit.fitted_slope,
        "stderr": fit.slope_stderr,
        "expected_slope": predicted,
    });
    Ok(RunOutput {
        tables: vec![t],
        results,
        checks: slope_check(e, fit.fitted_slope, predicted),
        plots: vec![PlotSpec::log_log("series", "n", &["ratio"], "third derivative ratio")],
    })
}

fn case_name(c: &LemmaCase) -> String {
    serde_json::to_value(c).ok().and_then(|v| v["case"].as_str().map(String::from)).unwrap_or_default()
}

fn lemmas(seed: u64, s: &LemmaSettings, e: &Expectations) -> Result<RunOutput, CliError> {
    let mut cases = s.cases.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = s.coefficient_range;
    for _ in 0..s.random_cubics {
        cases.push(LemmaCase::Cubic {
            a2: rng.gen_range(-r..=r),
            a1: rng.gen_range(-r..=r),
            a0: rng.gen_range(-r..=r),
            l: s.cubic_exponent,
        });
    }
    if let Some(g) = &s.sup_grid {
        cases.extend(sup_integral_grid(g.alpha, g.s, g.eps, &g.xi, &g.tau));
    }
    let mut t = Table::new(
        "lemma",
        &[
            "index",
            "case",
            "params",
            "value",
            "bound",
            "ratio",
            "truncation",
            "tail_bound",
            "doublings",
            "doubled_change",
            "quadrature_error",
        ],
    );
    let (mut sup, mut change) = (0.0f64, 0.0f64);
    for (i, c) in cases.iter().enumerate() {
        let r = integral_check(c)?;
        sup = sup.max(r.ratio);
        change = change.max(r.doubled_change);
        t.push(vec![
            i.into(),
            case_name(c).into(),
            serde_json::to_string(c).expect("serializable").into(),
            r.value.into(),
            r.bound.into(),
            r.ratio.into(),
            r.truncation.into(),
            r.tail_bound.into(),
            r.doublings.into(),
            r.doubled_change.into(),
            r.quadrature_error.into(),
        ]);
    }
    let mut checks = Vec::new();
    if let Some(l) = e.max_ratio {
        checks.push(Check::at_most("max_ratio", sup, l));
    }
    if let Some(l) = e.max_doubled_change {
        checks.push(Check::at_most("max_doubled_change", change, l));
    }
    Ok(RunOutput {
        tables: vec![t],
        results: json!({ "cases": cases.len(), "sup_ratio": sup, "max_doubled_change": change, "seed": seed }),
        checks,
        plots: Vec::new(),
    })
}

fn convnorm(s: &ConvnormSettings, e: &Expectations) -> Result<RunOutput, CliError> {
    let base: Vec<FreqRect> =
        s.rects.iter().map(|r| FreqRect::new(r[0], r[1], r[2], r[3])).collect::<Result<_, _>>()?;
    let n = base.len() as f64;
    let mut t = Table::new("convnorm", &["xi_factor", "tau_factor", "value", "area", "normalized"]);
    let mut normalized = Vec::new();
    let mut values = Vec::new();
    for &[a, b] in &s.scales {
        if !(a > 0.0 && b > 0.0) {
            return Err(CliError::Validation(format!("scale factors must be positive, got [{a}, {b}]")));
        }
        let rs: Vec<FreqRect> = base.iter().map(|r| r.scaled(a, b)).collect();
        let value = rect_convolution_norm(&rs)?;
        let area = rs[0].area();
        let norm = value / area.powf(n - 0.5);
        t.push(vec![a.into(), b.into(), value.into(), area.into(), norm.into()]);
        normalized.push(norm);
        values.push(value);
    }
    let spread = normalized.iter().map(|v| (v - normalized[0]).abs() / normalized[0]).fold(0.0, f64::max);
    let mut checks = Vec::new();
    if let (Some(v), Some(tol)) = (e.value, e.value_tolerance) {
        checks.push(Check::near("value", values[0], v, tol));
    }
    Ok(RunOutput {
        tables: vec![t],
        results: json!({ "values": values, "normalized": normalized, "scale_spread": spread }),
        checks,
        plots: Vec::new(),
    })
}

fn resonance(s: &ResonanceSettings, e: &Expectations) -> Result<RunOutput, CliError> {
    let mut t = Table::new("resonance", &["variant", "alpha", "status", "c1", "c2", "c3", "residual"]);
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    let blank = || Cell::Text(String::new());
    for &v in &s.variants {
        for &alpha in &s.alphas {
            match solve_resonance_constants(v, alpha) {
                Ok(sys) => {
                    let c = sys.as_array();
                    let res = resonance_residual(v, alpha, c);
                    worst = worst.max(res);
                    t.push(vec![v.name().into(), alpha.into(), "ok".into(), c[0].into(), c[1].into(), c[2].into(), res.into()]);
                    out.push(json!({ "variant": v, "alpha": alpha, "status": "ok", "constants": c, "residual": res }));
                }
                Err(err) => {
                    let status = match err {
                        mkdv_core::Error::NoRealSolution { .. } => "no_real_solution",
                        mkdv_core::Error::InvalidParameter(_) => "invalid_alpha",
                        other => return Err(other.into()),
                    };
                    t.push(vec![v.name().into(), alpha.into(), status.into(), blank(), blank(), blank(), blank()]);
                    out.push(json!({ "variant": v, "alpha": alpha, "status": status }));
                }
            }
        }
    }
    let mut checks = Vec::new();
    if let Some(l) = e.max_residual {
        checks.push(Check::at_most("max_residual", worst, l));
    }
    Ok(RunOutput { tables: vec![t], results: json!({ "systems": out, "max_residual": worst }), checks, plots: Vec::new() })
}
