// SPDX-License-Identifier: Apache-2.0

//! Empirical region checks for the trilinear and bilinear estimates.
//!
//! Outside the proven region the matching counterexample family is run and its
//! ratio slope is fitted. Inside, a probe sweep takes the sup of the ratios over
//! every applicable family plus a fixed low-frequency probe at each `N`. A bounded
//! sup is consistent with the estimate holding. Nothing here is a proof.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;

use super::families::{build_counterexample, expected_slope, FamilyId, DEFAULT_R};
use super::fit::{RatioEntry, RatioSeries};
use super::ratio::estimate_ratio;

/// Which estimate is being checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `(v w1 w2)_x` into the `v` space.
    Trilinear,
    /// The bilinear form with the high-frequency `w` factor.
    Bilinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    HoldsConsistent,
    Fails { slope: f64 },
    Inconclusive,
}

/// Slope above `3 stderr + 0.02` means growth; `|slope| <= 0.1` means bounded.
pub fn classify(slope: f64, stderr: f64) -> Verdict {
    if slope > 3.0 * stderr + 0.02 {
        Verdict::Fails { slope }
    } else if slope.abs() <= 0.1 {
        Verdict::HoldsConsistent
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionVerdict {
    pub s: f64,
    pub k: f64,
    pub alpha: f64,
    pub side: Side,
    pub in_region: bool,
    pub verdict: Verdict,
    /// Families that entered the sweep (one for a failure run).
    pub families: Vec<FamilyId>,
    /// Slope predicted by the construction, when a single family was run.
    pub expected_slope: Option<f64>,
    /// Sup series that the verdict is fitted on.
    pub series: RatioSeries,
    /// Per-family fitted slopes; inside the region these show each family decaying.
    pub family_slopes: Vec<(FamilyId, f64)>,
}

const TOL: f64 = 1e-12;

/// Membership in the proven region for the chosen estimate.
pub fn in_region(side: Side, s: f64, k: f64) -> bool {
    let half = -0.5;
    let open = s > half + TOL && k > half + TOL;
    let edge = (s - half).abs() <= TOL && k > half + TOL;
    match side {
        Side::Trilinear => (open && (s - k).abs() <= 0.5 + TOL) || edge,
        Side::Bilinear => (open && s - k <= 0.5 + TOL) || edge,
    }
}

fn is_endpoint(s: f64, k: f64) -> bool {
    (s + 0.5).abs() <= TOL && (k + 0.5).abs() <= TOL
}

/// Counterexample families whose predicted slope is positive at `(s, k)`.
fn failing_families(side: Side, p: &ModelParams) -> Vec<FamilyId> {
    let candidates: &[FamilyId] = match side {
        Side::Trilinear => &[FamilyId::P52a, FamilyId::P52b, FamilyId::P53],
        Side::Bilinear => &[FamilyId::P61a, FamilyId::P61b],
    };
    let mut out: Vec<FamilyId> =
        candidates.iter().copied().filter(|&id| expected_slope(id, p, DEFAULT_R) > 0.0).collect();
    if is_endpoint(p.s, p.k) {
        out.push(if side == Side::Trilinear { FamilyId::P54 } else { FamilyId::P62 });
    }
    out
}

fn probe_families(side: Side) -> Vec<FamilyId> {
    match side {
        Side::Trilinear => vec![FamilyId::P52a, FamilyId::P52b, FamilyId::P53, FamilyId::ProbeTrilinear],
        Side::Bilinear => vec![FamilyId::P61a, FamilyId::P61b, FamilyId::ProbeBilinear],
    }
}

fn entry(id: FamilyId, p: &ModelParams, n: f64) -> Result<RatioEntry> {
    let fam = build_counterexample(id, p, n, None)?;
    let rep = estimate_ratio(&fam)?;
    Ok(RatioEntry { n, lhs: rep.lhs, rhs: rep.rhs, ratio: rep.ratio, ratio_lo: rep.ratio_lo, ratio_hi: rep.ratio_hi })
}

/// Sup over families at each `N`, with each family's own series. Families without
/// resonance constants at this `alpha` are dropped; other errors propagate.
fn sup_series(ids: &[FamilyId], p: &ModelParams, ns: &[f64]) -> Result<(Vec<FamilyId>, Vec<Vec<RatioEntry>>)> {
    let mut used = Vec::new();
    for &id in ids {
        match build_counterexample(id, p, ns[0], None) {
            Ok(_) => used.push(id),
            Err(Error::NoRealSolution { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if used.is_empty() {
        return Err(Error::EmptyFamily("no probe family is constructible".into()));
    }
    let per_family = used
        .par_iter()
        .map(|&id| ns.iter().map(|&n| entry(id, p, n)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok((used, per_family))
}

fn sup_entries(per_family: &[Vec<RatioEntry>]) -> Vec<RatioEntry> {
    (0..per_family[0].len())
        .map(|i| {
            per_family
                .iter()
                .map(|f| f[i])
                .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
                .expect("non-empty family list")
        })
        .collect()
}

/// Runs the matching family (outside the region) or the probe sweep (inside).
pub fn verify_estimate_region(s: f64, k: f64, params: &ModelParams, side: Side, ns: &[f64]) -> Result<RegionVerdict> {
    let p = params.with_indices(s, k);
    p.validate()?;
    let inside = in_region(side, s, k);
    let label = format!("{side:?} (s,k)=({s},{k}) alpha={}", p.alpha);
    let failing = if inside { Vec::new() } else { failing_families(side, &p) };

    let (families, entries, expected, family_slopes) = if let Some(&id) = failing
        .iter()
        .filter(|&&id| build_counterexample(id, &p, ns.first().copied().unwrap_or(1.0), None).is_ok())
        .max_by(|a, b| expected_slope(**a, &p, DEFAULT_R).total_cmp(&expected_slope(**b, &p, DEFAULT_R)))
    {
        let entries = ns.par_iter().map(|&n| entry(id, &p, n)).collect::<Result<Vec<_>>>()?;
        (vec![id], entries, Some(expected_slope(id, &p, DEFAULT_R)), Vec::new())
    } else {
        let (used, per_family) = sup_series(&probe_families(side), &p, ns)?;
        let mut slopes = Vec::with_capacity(used.len());
        for (id, f) in used.iter().zip(&per_family) {
            slopes.push((*id, RatioSeries::from_entries(format!("{id:?}"), f.clone())?.fitted_slope));
        }
        (used, sup_entries(&per_family), None, slopes)
    };

    let series = RatioSeries::from_entries(label, entries)?;
    let verdict = classify(series.fitted_slope, series.slope_stderr);
    Ok(RegionVerdict { s, k, alpha: p.alpha, side, in_region: inside, verdict, families, expected_slope: expected, series, family_slopes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dyadic(lo: i32, hi: i32) -> Vec<f64> {
        (lo..=hi).map(|j| 2f64.powi(j)).collect()
    }

    #[test]
    fn region_membership() {
        assert!(in_region(Side::Bilinear, 0.0, 0.0));
        assert!(in_region(Side::Bilinear, 0.0, 0.5));
        assert!(in_region(Side::Bilinear, -0.5, 0.0));
        assert!(!in_region(Side::Bilinear, 1.0, 0.0));
        assert!(!in_region(Side::Bilinear, -0.5, -0.5));
        assert!(in_region(Side::Trilinear, 0.25, 0.25));
        assert!(!in_region(Side::Trilinear, 2.0, 0.0));
        assert!(!in_region(Side::Trilinear, 0.0, -1.0));
    }

    #[test]
    fn classification_thresholds() {
        assert_eq!(classify(0.05, 0.01), Verdict::HoldsConsistent);
        assert_eq!(classify(0.5, 0.01), Verdict::Fails { slope: 0.5 });
        assert_eq!(classify(-0.5, 0.01), Verdict::Inconclusive);
        // a noisy positive slope is not declared a failure
        assert_eq!(classify(0.3, 0.2), Verdict::Inconclusive);
    }

    #[test]
    fn outside_point_fails_with_unit_slope() {
        let p = ModelParams::trilinear_preset(2.0, 2.0, 0.0, 0.1).unwrap();
        let v = verify_estimate_region(2.0, 0.0, &p, Side::Trilinear, &dyadic(4, 9)).unwrap();
        assert!(!v.in_region);
        assert_eq!(v.families, vec![FamilyId::P52a]);
        match v.verdict {
            Verdict::Fails { slope } => assert!((slope - 1.0).abs() < 0.15, "slope {slope}"),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn inside_points_are_bounded() {
        for alpha in [-1.0, 2.0] {
            for (s, k) in [(0.0, 0.0), (0.25, 0.25), (0.0, 0.5)] {
                let p = ModelParams::trilinear_preset(alpha, s, k, 0.1).unwrap();
                let v = verify_estimate_region(s, k, &p, Side::Bilinear, &dyadic(4, 9)).unwrap();
                assert!(v.in_region);
                assert_eq!(v.verdict, Verdict::HoldsConsistent, "{v:?}");
                assert!(v.family_slopes.iter().all(|(_, sl)| *sl <= 0.1));
            }
        }
    }

    #[test]
    fn endpoint_fails_for_positive_eps() {
        for eps in [0.1, 0.15] {
            let p = ModelParams::trilinear_preset(2.0, -0.5, -0.5, eps).unwrap();
            let v = verify_estimate_region(-0.5, -0.5, &p, Side::Trilinear, &dyadic(4, 9)).unwrap();
            assert_eq!(v.families, vec![FamilyId::P54]);
            assert!(matches!(v.verdict, Verdict::Fails { .. }), "{v:?}");
        }
    }
}
