// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration. One TOML file per run; unknown keys are rejected.

use std::path::PathBuf;

use mkdv_core::lab::{C3Family, Component, FamilyId, LemmaCase, ResonanceVariant, Side};
use mkdv_core::ModelParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Simulate,
    Invariants,
    Picard,
    EstimateRegion,
    Counterexample,
    C3Derivative,
    LemmaCheck,
    Convnorm,
    Resonance,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Invariants => "invariants",
            Self::Picard => "picard",
            Self::EstimateRegion => "estimate-region",
            Self::Counterexample => "counterexample",
            Self::C3Derivative => "c3-derivative",
            Self::LemmaCheck => "lemma-check",
            Self::Convnorm => "convnorm",
            Self::Resonance => "resonance",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Overridden by `--out`.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Drives the randomized sweeps; everything else is deterministic already.
    #[serde(default)]
    pub seed: u64,
    pub params: ModelParams,
    #[serde(default)]
    pub simulate: Option<SimulateSettings>,
    #[serde(default)]
    pub invariants: Option<InvariantSettings>,
    #[serde(default)]
    pub picard: Option<PicardSettings>,
    #[serde(default)]
    pub estimate_region: Option<RegionSettings>,
    #[serde(default)]
    pub counterexample: Option<CounterexampleSettings>,
    #[serde(default)]
    pub c3_derivative: Option<C3Settings>,
    #[serde(default)]
    pub lemma_check: Option<LemmaSettings>,
    #[serde(default)]
    pub convnorm: Option<ConvnormSettings>,
    #[serde(default)]
    pub resonance: Option<ResonanceSettings>,
    /// Acceptance thresholds checked under `--assert`.
    #[serde(default)]
    pub expect: Option<Expectations>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSettings {
    pub n: usize,
    /// The box is `[-half_length, half_length)`.
    pub half_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Zero,
    /// `(a g(x), a g(x - shift))` with `g` a Gaussian of the given width.
    Gaussian { amplitude: f64, width: f64, shift: f64 },
    Sech { amplitude: f64, width: f64, shift: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSettings {
    pub grid: GridSettings,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "one")]
    pub record_every: usize,
    #[serde(default)]
    pub dealias_fraction: Option<f64>,
    #[serde(default = "yes")]
    pub nonlinear: bool,
    pub initial: InitialData,
    /// Also write the sampled fields (one row per time sample and grid point).
    #[serde(default)]
    pub write_fields: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantSettings {
    pub grid: GridSettings,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "one")]
    pub record_every: usize,
    #[serde(default)]
    pub dealias_fraction: Option<f64>,
    pub initial: InitialData,
    /// Number of step halvings in a self-convergence study; 0 skips it.
    #[serde(default)]
    pub convergence_levels: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardSettings {
    pub grid: GridSettings,
    pub iterations: usize,
    pub quadrature_steps: usize,
    pub initial: InitialData,
    /// Rescale the data to this `L^2 x L^2` norm.
    #[serde(default)]
    pub l2_norm: Option<f64>,
    /// Step size of the solver comparison; omitted skips it.
    #[serde(default)]
    pub compare_dt: Option<f64>,
    #[serde(default = "ten")]
    pub compare_factor: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSettings {
    pub side: Side,
    /// `[s, k]` pairs.
    pub points: Vec<[f64; 2]>,
    pub n: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleSettings {
    pub family: FamilyId,
    pub n: Vec<f64>,
    #[serde(default)]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct C3Settings {
    pub family: C3Family,
    pub component: Component,
    pub n: Vec<f64>,
    pub t: f64,
    pub eps_loc: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupGridSettings {
    pub alpha: f64,
    pub s: f64,
    pub eps: f64,
    pub xi: Vec<f64>,
    pub tau: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaSettings {
    #[serde(default)]
    pub cases: Vec<LemmaCase>,
    /// Random cubic cases with coefficients uniform in `[-coefficient_range, coefficient_range]`.
    #[serde(default)]
    pub random_cubics: usize,
    #[serde(default = "five")]
    pub coefficient_range: f64,
    #[serde(default = "half")]
    pub cubic_exponent: f64,
    #[serde(default)]
    pub sup_grid: Option<SupGridSettings>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvnormSettings {
    /// `[xi_center, tau_center, xi_halfwidth, tau_halfwidth]`; all halfwidths must agree.
    pub rects: Vec<[f64; 4]>,
    /// `[xi_factor, tau_factor]` applied to every rectangle.
    #[serde(default = "unit_scale")]
    pub scales: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceSettings {
    pub variants: Vec<ResonanceVariant>,
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    /// Target slope; `counterexample` and `c3-derivative` default to the predicted one.
    pub slope: Option<f64>,
    pub slope_tolerance: Option<f64>,
    pub max_drift_i1: Option<f64>,
    pub max_drift_i2: Option<f64>,
    pub max_ratio: Option<f64>,
    pub max_doubled_change: Option<f64>,
    pub max_residual: Option<f64>,
    pub value: Option<f64>,
    pub value_tolerance: Option<f64>,
    /// `holds_consistent`, `fails` or `inconclusive`, required of every point.
    pub verdict: Option<String>,
}

fn one() -> usize {
    1
}
fn yes() -> bool {
    true
}
fn ten() -> f64 {
    10.0
}
fn five() -> f64 {
    5.0
}
fn half() -> f64 {
    0.5
}
fn unit_scale() -> Vec<[f64; 2]> {
    vec![[1.0, 1.0]]
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Exactly the section named by `experiment` must be present, and the
    /// expectations must be ones that experiment checks.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Validation(m));
        let present: Vec<&str> = [
            ("simulate", self.simulate.is_some()),
            ("invariants", self.invariants.is_some()),
            ("picard", self.picard.is_some()),
            ("estimate_region", self.estimate_region.is_some()),
            ("counterexample", self.counterexample.is_some()),
            ("c3_derivative", self.c3_derivative.is_some()),
            ("lemma_check", self.lemma_check.is_some()),
            ("convnorm", self.convnorm.is_some()),
            ("resonance", self.resonance.is_some()),
        ]
        .into_iter()
        .filter(|p| p.1)
        .map(|p| p.0)
        .collect();
        let want = self.experiment.name().replace('-', "_");
        if present != [want.as_str()] {
            return bad(format!("experiment `{}` needs exactly the [{want}] section, found {present:?}", self.experiment.name()));
        }
        self.params.validate().map_err(|e| CliError::Validation(e.to_string()))?;

        let sweep = |ns: &[f64]| -> Result<(), CliError> {
            if ns.len() < 4 {
                return bad(format!("an N sweep needs at least 4 values, got {}", ns.len()));
            }
            if ns.windows(2).any(|w| w[1] <= w[0]) || ns.iter().any(|n| !(n.is_finite() && *n >= 1.0)) {
                return bad("N values must be finite, >= 1 and strictly increasing".into());
            }
            Ok(())
        };
        let grid = |g: &GridSettings| -> Result<(), CliError> {
            if !(g.n >= 8 && g.n.is_power_of_two()) || !(g.half_length > 0.0 && g.half_length.is_finite()) {
                return bad(format!("grid needs n a power of two >= 8 and half_length > 0, got {g:?}"));
            }
            Ok(())
        };
        let steps = |dt: f64, t_end: f64| -> Result<(), CliError> {
            if !(dt > 0.0 && t_end >= 0.0 && dt.is_finite() && t_end.is_finite()) {
                return bad(format!("need dt > 0 and t_end >= 0, got dt = {dt}, t_end = {t_end}"));
            }
            Ok(())
        };

        let allowed: &[&str] = match self.experiment {
            ExperimentKind::Simulate => {
                let s = self.simulate.as_ref().unwrap();
                grid(&s.grid)?;
                steps(s.dt, s.t_end)?;
                &["max_drift_i1", "max_drift_i2"]
            }
            ExperimentKind::Invariants => {
                let s = self.invariants.as_ref().unwrap();
                grid(&s.grid)?;
                steps(s.dt, s.t_end)?;
                if s.convergence_levels == 1 || s.convergence_levels == 2 {
                    return bad("convergence_levels must be 0 or at least 3".into());
                }
                &["max_drift_i1", "max_drift_i2", "slope", "slope_tolerance"]
            }
            ExperimentKind::Picard => {
                let s = self.picard.as_ref().unwrap();
                grid(&s.grid)?;
                if s.iterations == 0 || s.quadrature_steps < 2 || s.quadrature_steps % 2 != 0 {
                    return bad("picard needs iterations >= 1 and an even quadrature_steps >= 2".into());
                }
                &["max_ratio"]
            }
            ExperimentKind::EstimateRegion => {
                let s = self.estimate_region.as_ref().unwrap();
                sweep(&s.n)?;
                if s.points.is_empty() {
                    return bad("estimate_region.points is empty".into());
                }
                &["verdict"]
            }
            ExperimentKind::Counterexample => {
                sweep(&self.counterexample.as_ref().unwrap().n)?;
                &["slope", "slope_tolerance"]
            }
            ExperimentKind::C3Derivative => {
                let s = self.c3_derivative.as_ref().unwrap();
                sweep(&s.n)?;
                if !(s.t > 0.0 && s.eps_loc > 0.0) {
                    return bad("c3_derivative needs t > 0 and eps_loc > 0".into());
                }
                &["slope", "slope_tolerance"]
            }
            ExperimentKind::LemmaCheck => {
                let s = self.lemma_check.as_ref().unwrap();
                if s.cases.is_empty() && s.random_cubics == 0 && s.sup_grid.is_none() {
                    return bad("lemma_check has no cases".into());
                }
                &["max_ratio", "max_doubled_change"]
            }
            ExperimentKind::Convnorm => {
                let s = self.convnorm.as_ref().unwrap();
                if s.rects.is_empty() || s.scales.is_empty() {
                    return bad("convnorm needs at least one rectangle and one scale".into());
                }
                &["value", "value_tolerance"]
            }
            ExperimentKind::Resonance => {
                let s = self.resonance.as_ref().unwrap();
                if s.variants.is_empty() || s.alphas.is_empty() {
                    return bad("resonance needs variants and alphas".into());
                }
                &["max_residual"]
            }
        };
        if let Some(e) = &self.expect {
            let set = [
                ("slope", e.slope.is_some()),
                ("slope_tolerance", e.slope_tolerance.is_some()),
                ("max_drift_i1", e.max_drift_i1.is_some()),
                ("max_drift_i2", e.max_drift_i2.is_some()),
                ("max_ratio", e.max_ratio.is_some()),
                ("max_doubled_change", e.max_doubled_change.is_some()),
                ("max_residual", e.max_residual.is_some()),
                ("value", e.value.is_some()),
                ("value_tolerance", e.value_tolerance.is_some()),
                ("verdict", e.verdict.is_some()),
            ];
            if let Some((name, _)) = set.iter().find(|(n, on)| *on && !allowed.contains(n)) {
                return bad(format!("expectation `{name}` does not apply to `{}`", self.experiment.name()));
            }
            if let Some(v) = &e.verdict {
                if !["holds_consistent", "fails", "inconclusive"].contains(&v.as_str()) {
                    return bad(format!("unknown verdict `{v}`"));
                }
            }
            if e.value.is_some() != e.value_tolerance.is_some() {
                return bad("value and value_tolerance go together".into());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PARAMS: &str = "[params]\nalpha = 2.0\ns = 0.0\nk = 0.0\nb = 0.6\nb_prime = -0.3\neps = 0.1\ndelta = 0.1\n";

    #[test]
    fn unknown_key_is_a_parse_error() {
        let text = format!("experiment = \"resonance\"\ncolour = 1\n{PARAMS}[resonance]\nvariants = [\"ThreeConstV\"]\nalphas = [2.0]\n");
        assert!(matches!(ExperimentConfig::parse(&text), Err(CliError::Parse(_))));
    }

    #[test]
    fn section_must_match_experiment() {
        let text = format!("experiment = \"counterexample\"\n{PARAMS}[resonance]\nvariants = [\"ThreeConstV\"]\nalphas = [2.0]\n");
        let cfg = ExperimentConfig::parse(&text).unwrap();
        assert!(matches!(cfg.validate(), Err(CliError::Validation(_))));
    }

    #[test]
    fn foreign_expectation_rejected() {
        let text = format!(
            "experiment = \"resonance\"\n{PARAMS}[resonance]\nvariants = [\"ThreeConstV\"]\nalphas = [2.0]\n[expect]\nslope = 1.0\n"
        );
        let cfg = ExperimentConfig::parse(&text).unwrap();
        assert!(matches!(cfg.validate(), Err(CliError::Validation(_))));
    }
}
