// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::interval::{Cubic, Interval};
use super::resonance::{solve_resonance_constants, ResonanceSystem, ResonanceVariant};
use super::sets::{image_bounds, verify_containment, FreqRect, Slab};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::spectral::WeightSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyId {
    /// Trilinear, `s - 2k > 1`.
    P52a,
    /// Trilinear, `k < -1/2`, three resonant constants.
    P52b,
    /// Trilinear, low frequency with large modulation.
    P53,
    /// Trilinear endpoint rectangles.
    P54,
    /// Bilinear, `s - k > 1/2`.
    P61a,
    /// Bilinear, `k < -1/2`.
    P61b,
    /// Bilinear endpoint rectangles.
    P62,
    /// Fixed unit sets at the origin with the trilinear kernel; not a counterexample.
    ProbeTrilinear,
    /// Fixed unit sets at the origin with the bilinear kernel; not a counterexample.
    ProbeBilinear,
}

impl FamilyId {
    pub const ALL: [Self; 7] = [Self::P52a, Self::P52b, Self::P53, Self::P54, Self::P61a, Self::P61b, Self::P62];

    pub fn is_trilinear(self) -> bool {
        matches!(self, Self::P52a | Self::P52b | Self::P53 | Self::P54 | Self::ProbeTrilinear)
    }

    pub fn is_endpoint(self) -> bool {
        matches!(self, Self::P54 | Self::P62)
    }
}

/// An input set carrying the indicator test function, divided by its weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InputFactor {
    pub set: Slab,
    pub weight: WeightSpec,
}

/// Weight multiplying the convolution, optionally with the derivative factor `|xi|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutputWeight {
    pub weight: WeightSpec,
    pub abs_xi: bool,
}

impl OutputWeight {
    pub fn eval(&self, xi: f64, tau: f64) -> f64 {
        let d = if self.abs_xi { xi.abs() } else { 1.0 };
        d * self.weight.eval(xi, tau)
    }

    /// Range over a region given by its `xi` and modulation intervals.
    pub fn range(&self, xi: Interval, sigma: Interval) -> (f64, f64) {
        let (lo, hi) = self.weight.range((xi.mig(), xi.mag()), (sigma.mig(), sigma.mag()));
        if self.abs_xi {
            (lo * xi.mig(), hi * xi.mag())
        } else {
            (lo, hi)
        }
    }
}

/// One instance of a counterexample construction at frequency scale `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleFamily {
    pub id: FamilyId,
    pub params: ModelParams,
    pub n: f64,
    pub r: Option<f64>,
    /// `A, B (, C)`.
    pub inputs: Vec<InputFactor>,
    /// Target set `R` of the containment argument; the rectangle families have none.
    pub target: Option<Slab>,
    pub output: Option<OutputWeight>,
    /// Modulation bound on `A` produced by the containment chain.
    pub c_alpha: Option<f64>,
    pub constants: Option<ResonanceSystem>,
}

impl CounterexampleFamily {
    pub fn is_trilinear(&self) -> bool {
        self.inputs.len() == 3
    }

    /// Bounding rectangles of `A, B, (C), R`.
    pub fn rects(&self) -> Vec<FreqRect> {
        self.inputs.iter().map(|f| &f.set).chain(self.target.as_ref()).map(Slab::bounding_box).collect()
    }

    pub fn sets(&self) -> Vec<Slab> {
        self.inputs.iter().map(|f| f.set).collect()
    }

    /// Growth exponent of the ratio predicted by the construction.
    pub fn expected_slope(&self) -> f64 {
        expected_slope(self.id, &self.params, self.r.unwrap_or(DEFAULT_R))
    }

    /// Re-checks the containment invariant (no-op for the rectangle families).
    pub fn verify(&self) -> Result<()> {
        let Some(r) = &self.target else { return Ok(()) };
        let mut chain: Vec<(f64, &Slab)> = vec![(1.0, r)];
        chain.extend(self.inputs[1..].iter().map(|f| (-1.0, &f.set)));
        verify_containment(&chain, &self.inputs[0].set, &format!("{:?} N={}", self.id, self.n))
    }
}

pub const DEFAULT_R: f64 = -1.0;

pub fn expected_slope(id: FamilyId, p: &ModelParams, r: f64) -> f64 {
    match id {
        FamilyId::P52a => p.s - 2.0 * p.k - 1.0,
        FamilyId::P52b => -2.0 * p.k - 1.0,
        FamilyId::P53 => p.s - p.k - 0.5 - 3.0 * p.b,
        FamilyId::P54 | FamilyId::P62 => -r * p.eps,
        FamilyId::P61a => p.s - p.k - 0.5,
        FamilyId::P61b => -p.k - 0.5,
        FamilyId::ProbeTrilinear | FamilyId::ProbeBilinear => 0.0,
    }
}

/// Symmetric modulation slab over `xi` that holds `sum sign_i S_i` for dispersion `c`.
fn enclosing_slab(chain: &[(f64, &Slab)], xi: Interval, c: f64) -> Result<(Slab, f64)> {
    let (_, sigma, _) = image_bounds(chain, &Cubic::dispersion(c));
    // round outward so the containment check never sits on the boundary
    let c_alpha = sigma.mag() * (1.0 + 1e-9) + 1e-12;
    Ok((Slab::new(xi, Cubic::dispersion(c), Interval::centered(0.0, c_alpha))?, c_alpha))
}

fn rect_on(xc: f64, tc: f64, wx: f64, wt: f64) -> Result<Slab> {
    Ok(Slab::from(FreqRect::new(xc, tc, wx, wt)?))
}

pub fn build_counterexample(
    id: FamilyId,
    params: &ModelParams,
    n: f64,
    r: Option<f64>,
) -> Result<CounterexampleFamily> {
    params.validate()?;
    if !(n.is_finite() && n >= 1.0) {
        return Err(Error::InvalidParameter(format!("N = {n} must be >= 1")));
    }
    let r_val = r.unwrap_or(DEFAULT_R);
    if id.is_endpoint() && !(r_val > -2.0 && r_val < 0.0) {
        return Err(Error::InvalidParameter(format!("r = {r_val} must lie in (-2, 0)")));
    }
    let p = *params;
    let (a, s, k, b, eps) = (p.alpha, p.s, p.k, p.b, p.eps);
    let out_ts = Some(OutputWeight { weight: WeightSpec::new(s, 1.0, p.b_prime), abs_xi: true });
    let mut c_alpha = None;
    let mut constants = None;

    let (inputs, target, output) = match id {
        FamilyId::P52a | FamilyId::P52b | FamilyId::P53 => {
            let w2 = WeightSpec::new(k, a, b);
            let curve_a = Cubic::dispersion(a);
            let (xi1, bset, cset, rset) = match id {
                FamilyId::P53 => {
                    let bset = Slab::on_curve(0.0, 0.5, curve_a, 1.0)?;
                    let cset = Slab::on_curve(n, 0.25, curve_a, 1.0)?;
                    let rset = Slab::on_curve(n, 0.25, Cubic::dispersion(1.0), 1.0)?;
                    (Interval::centered(0.0, 1.0), bset, cset, rset)
                }
                _ => {
                    let sys = if id == FamilyId::P52a {
                        solve_resonance_constants(ResonanceVariant::TwoConstAlpha, a)?
                    } else {
                        solve_resonance_constants(ResonanceVariant::ThreeConstV, a)?
                    };
                    constants = Some(sys);
                    let [c1, c2, c3] = sys.as_array();
                    let h = n.powi(-2);
                    let bset = Slab::on_curve(c2 * n, h / 3.0, curve_a, 1.0)?;
                    let cset = Slab::on_curve(c3 * n, h / 3.0, curve_a, 1.0)?;
                    let rset = Slab::on_curve(n, h / 3.0, Cubic::dispersion(1.0), 1.0)?;
                    (Interval::centered(c1 * n, h), bset, cset, rset)
                }
            };
            let (aset, ca) = enclosing_slab(&[(1.0, &rset), (-1.0, &bset), (-1.0, &cset)], xi1, 1.0)?;
            c_alpha = Some(ca);
            let inputs = vec![
                InputFactor { set: aset, weight: WeightSpec::new(s, 1.0, b) },
                InputFactor { set: bset, weight: w2 },
                InputFactor { set: cset, weight: w2 },
            ];
            (inputs, Some(rset), out_ts)
        }
        FamilyId::P54 => {
            // α c1³ + α c2³ + c3³ = 1: the third constant carries the unit coefficient
            let sys = solve_resonance_constants(ResonanceVariant::ThreeConstV, a)?;
            constants = Some(sys);
            let [u, c1, c2] = sys.as_array();
            let (wx, wt) = (0.5 * n.powf(-(2.0 + r_val)), 0.5 * n.powf(-r_val));
            let half = -0.5;
            let wa = WeightSpec::new(half, a, 0.5 + eps);
            let inputs = vec![
                InputFactor { set: rect_on(c1 * n, a * (c1 * n).powi(3), wx, wt)?, weight: wa },
                InputFactor { set: rect_on(c2 * n, a * (c2 * n).powi(3), wx, wt)?, weight: wa },
                InputFactor {
                    set: rect_on(u * n, (u * n).powi(3), wx, wt)?,
                    weight: WeightSpec::new(half, 1.0, 0.5 + eps),
                },
            ];
            let out = OutputWeight { weight: WeightSpec::new(half, 1.0, -0.5 + 4.0 * eps), abs_xi: true };
            (inputs, None, Some(out))
        }
        FamilyId::P61a | FamilyId::P61b => {
            let wa = WeightSpec::new(-(s - k + 0.5), a, b);
            let wb = WeightSpec::new(s, 1.0, b);
            let q = (2.0 * n).powi(-2);
            if id == FamilyId::P61a {
                let bset = Slab::on_curve(0.0, q, Cubic::dispersion(1.0), 1.0)?;
                let rset = Slab::on_curve(n, q, Cubic::dispersion(a), 1.0)?;
                let xi1 = Interval::centered(n, n.powi(-2));
                let (aset, ca) = enclosing_slab(&[(1.0, &rset), (-1.0, &bset)], xi1, a)?;
                c_alpha = Some(ca);
                let inputs = vec![InputFactor { set: aset, weight: wa }, InputFactor { set: bset, weight: wb }];
                (inputs, Some(rset), None)
            } else {
                let aset = rect_on(n, a * n.powi(3), n.powi(-2), 2.0)?;
                let bset = rect_on(-n, -n.powi(3), q, 1.0)?;
                let rset = rect_on(0.0, (a - 1.0) * n.powi(3), q, 1.0)?;
                c_alpha = Some(aset.modulation(a).mag());
                let inputs = vec![InputFactor { set: aset, weight: wa }, InputFactor { set: bset, weight: wb }];
                (inputs, Some(rset), None)
            }
        }
        FamilyId::ProbeTrilinear => {
            let unit = |c: f64| Slab::on_curve(0.0, 0.5, Cubic::dispersion(c), 0.5);
            let w2 = WeightSpec::new(k, a, b);
            let inputs = vec![
                InputFactor { set: unit(1.0)?, weight: WeightSpec::new(s, 1.0, b) },
                InputFactor { set: unit(a)?, weight: w2 },
                InputFactor { set: unit(a)?, weight: w2 },
            ];
            (inputs, None, out_ts)
        }
        FamilyId::ProbeBilinear => {
            let inputs = vec![
                InputFactor {
                    set: Slab::on_curve(0.0, 0.5, Cubic::dispersion(a), 0.5)?,
                    weight: WeightSpec::new(-(s - k + 0.5), a, b),
                },
                InputFactor {
                    set: Slab::on_curve(0.0, 0.5, Cubic::dispersion(1.0), 0.5)?,
                    weight: WeightSpec::new(s, 1.0, b),
                },
            ];
            (inputs, None, None)
        }
        FamilyId::P62 => {
            let (wx, wt) = (0.5 * n.powf(-(2.0 + r_val)), 0.5 * n.powf(-r_val));
            let inputs = vec![
                InputFactor {
                    set: rect_on(n, n.powi(3), wx, wt)?,
                    weight: WeightSpec::new(-0.5, 1.0, 0.5 + eps),
                },
                InputFactor {
                    set: rect_on(n, a * n.powi(3), wx, wt)?,
                    weight: WeightSpec::new(-0.5, a, 0.5 - 2.0 * eps),
                },
            ];
            (inputs, None, None)
        }
    };

    let fam = CounterexampleFamily {
        id,
        params: p,
        n,
        r: id.is_endpoint().then_some(r_val),
        inputs,
        target,
        output,
        c_alpha,
        constants,
    };
    fam.verify()?;
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, s: f64, k: f64) -> ModelParams {
        ModelParams::trilinear_preset(alpha, s, k, 0.1).unwrap()
    }

    /// Dense sampling oracle for `R - B (- C) ⊂ A`.
    fn sampled_containment(f: &CounterexampleFamily) -> bool {
        let r = f.target.unwrap();
        let grid = [1e-6, 0.1, 0.5, 0.9, 1.0 - 1e-6];
        let a = &f.inputs[0].set;
        let mut ok = true;
        for &u in &grid {
            for &v in &grid {
                let (x, t) = r.point(u, v);
                for &u2 in &grid {
                    for &v2 in &grid {
                        let (x2, t2) = f.inputs[1].set.point(u2, v2);
                        if f.inputs.len() == 2 {
                            ok &= a.contains(x - x2, t - t2);
                        } else {
                            for &u3 in &grid {
                                for &v3 in &grid {
                                    let (x3, t3) = f.inputs[2].set.point(u3, v3);
                                    ok &= a.contains(x - x2 - x3, t - t2 - t3);
                                }
                            }
                        }
                    }
                }
            }
        }
        ok
    }

    #[test]
    fn every_family_verifies_across_scales() {
        for id in FamilyId::ALL {
            for n in [4.0, 16.0, 64.0, 256.0, 1024.0] {
                let f = build_counterexample(id, &params(2.0, 1.0, 0.0), n, None).unwrap();
                f.verify().unwrap();
                assert_eq!(f.inputs.len(), if id.is_trilinear() { 3 } else { 2 });
            }
        }
    }

    #[test]
    fn sampled_points_land_in_a() {
        for id in [FamilyId::P52a, FamilyId::P52b, FamilyId::P53, FamilyId::P61a, FamilyId::P61b] {
            for n in [4.0, 8.0, 32.0] {
                let f = build_counterexample(id, &params(2.0, 1.0, 0.0), n, None).unwrap();
                assert!(sampled_containment(&f), "{id:?} N={n}");
            }
        }
    }

    #[test]
    fn p52a_widths() {
        let n = 10.0;
        let f = build_counterexample(FamilyId::P52a, &params(2.0, 2.0, 0.0), n, None).unwrap();
        assert!((f.inputs[0].set.xi.halfwidth() - n.powi(-2)).abs() < 1e-15);
        assert!((f.inputs[1].set.xi.halfwidth() - n.powi(-2) / 3.0).abs() < 1e-15);
        assert!((f.inputs[2].set.xi.halfwidth() - n.powi(-2) / 3.0).abs() < 1e-15);
        // C_α stays bounded in N
        let c8 = f.c_alpha.unwrap();
        let big = build_counterexample(FamilyId::P52a, &params(2.0, 2.0, 0.0), 1000.0, None).unwrap();
        assert!(big.c_alpha.unwrap() < 2.0 * c8 && c8 < 20.0);
    }

    #[test]
    fn p54_rectangles() {
        let n = 16.0;
        let f = build_counterexample(FamilyId::P54, &params(2.0, -0.5, -0.5), n, Some(-1.0)).unwrap();
        let sys = f.constants.unwrap();
        let [u, c1, c2] = sys.as_array();
        let rects = f.rects();
        assert_eq!(rects.len(), 3);
        for (rect, (xc, tc)) in rects.iter().zip([
            (c1 * n, 2.0 * (c1 * n).powi(3)),
            (c2 * n, 2.0 * (c2 * n).powi(3)),
            (u * n, (u * n).powi(3)),
        ]) {
            assert!((rect.xi_center - xc).abs() < 1e-12 && (rect.tau_center - tc).abs() < 1e-9);
            assert!((2.0 * rect.xi_halfwidth - 1.0 / 16.0).abs() < 1e-15);
            assert!((2.0 * rect.tau_halfwidth - 16.0).abs() < 1e-12);
        }
        // the centres add up to a point of the output curve
        let xs: f64 = rects.iter().map(|r| r.xi_center).sum();
        let ts: f64 = rects.iter().map(|r| r.tau_center).sum();
        assert!((ts - xs.powi(3)).abs() < 1e-9 * n.powi(3));
    }

    #[test]
    fn p61a_modulation_stays_bounded() {
        let c = |n: f64| build_counterexample(FamilyId::P61a, &params(2.0, 1.0, 0.0), n, None).unwrap().c_alpha.unwrap();
        assert!(c(1024.0) < 2.0 * c(8.0));
    }

    #[test]
    fn slab_with_quadratic_correction_forces_cubic_modulation() {
        // |τ - αξ³ + (1-α)ξ²N| < 1 as a target: A must then reach |σ1| ~ |1-α| N³
        let (a, n) = (2.0f64, 64.0f64);
        let b = Slab::on_curve(0.0, (2.0 * n).powi(-2), Cubic::dispersion(1.0), 1.0).unwrap();
        let curve = Cubic { a3: a, a2: -(1.0 - a) * n, a1: 0.0, a0: 0.0 };
        let r = Slab::on_curve(n, (2.0 * n).powi(-2), curve, 1.0).unwrap();
        let (_, sigma, _) = image_bounds(&[(1.0, &r), (-1.0, &b)], &Cubic::dispersion(a));
        assert!(sigma.mig() > 0.5 * (1.0 - a).abs() * n.powi(3));
    }

    #[test]
    fn p53_modulation_is_cubic() {
        let f = build_counterexample(FamilyId::P53, &params(2.0, 3.0, 0.0), 64.0, None).unwrap();
        let ca = f.c_alpha.unwrap();
        assert!(ca > 0.5 * 64f64.powi(3) && ca < 4.0 * 64f64.powi(3));
    }

    #[test]
    fn missing_constants_propagate() {
        let p = ModelParams::trilinear_preset(8.0, 2.0, 0.0, 0.1).unwrap();
        assert!(matches!(
            build_counterexample(FamilyId::P52a, &p, 16.0, None),
            Err(Error::NoRealSolution { .. })
        ));
    }

    #[test]
    fn bad_inputs() {
        let p = params(2.0, 1.0, 0.0);
        assert!(build_counterexample(FamilyId::P54, &p, 16.0, Some(0.5)).is_err());
        assert!(build_counterexample(FamilyId::P52a, &p, 0.5, None).is_err());
    }

    #[test]
    fn expected_slopes() {
        let p = params(2.0, 2.0, 0.0);
        assert_eq!(expected_slope(FamilyId::P52a, &p, -1.0), 1.0);
        assert!((expected_slope(FamilyId::P54, &p, -1.0) - 0.1).abs() < 1e-15);
        assert_eq!(expected_slope(FamilyId::P61a, &params(2.0, 1.0, 0.0), -1.0), 0.5);
    }
}
