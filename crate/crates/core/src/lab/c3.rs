// SPDX-License-Identifier: Apache-2.0

//! Third Gateaux derivative of the data-to-solution map at the origin, tested on
//! indicator data in frequency.

use serde::{Deserialize, Serialize};

use super::boxconv::box_convolution_l2;
use super::interval::Interval;
use super::quadrature::{gauss_breaks, gauss_panel};
use super::resonance::{solve_resonance_constants, ResonanceVariant};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::spectral::bracket;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum C3Family {
    /// Unit-size sets near `0` and `N`, evaluated at `t_N ~ N^{-3}`.
    Highfreq,
    /// Sets of width `~ N^{-2}` on a resonant ray, at fixed `t`.
    Resonant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    V,
    W,
}

/// Frequency sets, weights and phase of one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct C3Setup {
    pub family: C3Family,
    pub component: Component,
    pub n: f64,
    /// Time at which the derivative is evaluated.
    pub t: f64,
    pub sets: [Interval; 3],
    pub target: Interval,
    /// Exponents of `<xi>`, `<xi_1>`, `<xi_2>`, `<xi_3>`.
    pub exps: [f64; 4],
    /// Cubic coefficients of the phase `xi^3 - sum k_i xi_i^3`.
    pub phase: [f64; 3],
    pub expected_slope: f64,
}

impl C3Setup {
    pub fn new(
        family: C3Family,
        component: Component,
        params: &ModelParams,
        n: f64,
        t: f64,
        eps_loc: f64,
    ) -> Result<Self> {
        params.validate()?;
        if !(n >= 1.0 && n.is_finite()) {
            return Err(Error::InvalidParameter(format!("N = {n} must be >= 1")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("t = {t} must be >= 0")));
        }
        let (a, s, k) = (params.alpha, params.s, params.k);
        let (exps, phase) = match component {
            Component::V => ([s, s, k, k], [1.0, a, a]),
            Component::W => ([k, s, s, k], [1.0, 1.0, a]),
        };
        let setup = match family {
            C3Family::Highfreq => {
                let low = Interval::centered(0.0, 0.25);
                let high = Interval::centered(n, 0.125);
                let (b, c) = match component {
                    Component::V => (low, high),
                    Component::W => (high, low),
                };
                let expected = match component {
                    Component::V => s - k - 2.0,
                    Component::W => k - s - 2.0,
                };
                Self {
                    family,
                    component,
                    n,
                    t: t / (2.0 * n.powi(3) * (1.0 + t)),
                    sets: [Interval::centered(0.0, 0.5), b, c],
                    target: Interval::centered(n, 0.125),
                    exps,
                    phase,
                    expected_slope: expected,
                }
            }
            C3Family::Resonant => {
                if !(eps_loc > 0.0) {
                    return Err(Error::InvalidParameter("localisation epsilon must be positive".into()));
                }
                let variant = match component {
                    Component::V => ResonanceVariant::ThreeConstQ,
                    Component::W => ResonanceVariant::ThreeConstP,
                };
                let [ca, cb, cc] = solve_resonance_constants(variant, a)?.as_array();
                let w = eps_loc / bracket(t) * n.powi(-2);
                let expected = match component {
                    Component::V => -2.0 * k - 1.0,
                    Component::W => -2.0 * s - 1.0,
                };
                Self {
                    family,
                    component,
                    n,
                    t,
                    sets: [
                        Interval::centered(ca * n, w),
                        Interval::centered(cb * n, 0.25 * w),
                        Interval::centered(cc * n, 0.25 * w),
                    ],
                    target: Interval::centered(n, 0.25 * w),
                    exps,
                    phase,
                    expected_slope: expected,
                }
            }
        };
        let image = setup.target - setup.sets[1] - setup.sets[2];
        if !image.within(&setup.sets[0], 1e-12 * n) {
            return Err(Error::ContainmentViolated(format!("R - B - C = {image:?} not in A = {:?}", setup.sets[0])));
        }
        Ok(setup)
    }

    /// `<xi>^e0 |xi| / (<xi_1>^e1 <xi_2>^e2 <xi_3>^e3)`.
    pub fn kernel(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        let x = x1 + x2 + x3;
        let e = self.exps;
        bracket(x).powf(e[0]) * x.abs() / (bracket(x1).powf(e[1]) * bracket(x2).powf(e[2]) * bracket(x3).powf(e[3]))
    }

    pub fn phase(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        let k = self.phase;
        (x1 + x2 + x3).powi(3) - k[0] * x1.powi(3) - k[1] * x2.powi(3) - k[2] * x3.powi(3)
    }

    fn sum_interval(&self) -> Interval {
        self.sets[0] + self.sets[1] + self.sets[2]
    }

    /// Enclosure of the phase over `A x B x C`, expanded around the set centres.
    pub fn phase_range(&self) -> Interval {
        let c: Vec<f64> = self.sets.iter().map(Interval::center).collect();
        let h: Vec<f64> = self.sets.iter().map(Interval::halfwidth).collect();
        let k = self.phase;
        let big: f64 = c.iter().sum();
        let mut constant = big.powi(3);
        let mut scale = big.abs().powi(3);
        let mut lin = 0.0;
        let mut quad = Interval::point(0.0);
        let mut cube = Interval::point(0.0);
        for i in 0..3 {
            constant -= k[i] * c[i].powi(3);
            scale += (k[i] * c[i].powi(3)).abs();
            lin += h[i] * (3.0 * (big * big - k[i] * c[i] * c[i])).abs();
            let d = Interval::centered(0.0, h[i]);
            quad = quad - d.sqr().scale(3.0 * k[i] * c[i]);
            cube = cube - d.cube().scale(k[i]);
        }
        let dsum = Interval::centered(0.0, h.iter().sum());
        quad = quad + dsum.sqr().scale(3.0 * big);
        cube = cube + dsum.cube();
        let slack = 1e-14 * scale.max(1.0);
        Interval::centered(constant, lin + slack) + quad + cube
    }

    fn kernel_range(&self) -> (f64, f64) {
        let pow = |iv: Interval, e: f64| {
            let (a, b) = (bracket(iv.mig()).powf(e), bracket(iv.mag()).powf(e));
            (a.min(b), a.max(b))
        };
        let sum = self.sum_interval();
        let (o_lo, o_hi) = pow(sum, self.exps[0]);
        let (mut lo, mut hi) = (o_lo * sum.mig(), o_hi * sum.mag());
        for i in 0..3 {
            let (w_lo, w_hi) = pow(self.sets[i], self.exps[i + 1]);
            lo /= w_hi;
            hi /= w_lo;
        }
        (lo, hi)
    }
}

/// `int_0^t cos(t' phi) dt'`.
fn time_integral(t: f64, phi: f64) -> f64 {
    let x = t * phi;
    if x.abs() < 1e-8 {
        t * (1.0 - x * x / 6.0)
    } else {
        (t * phi).sin() / phi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct C3Report {
    pub setup: C3Setup,
    /// Frozen-kernel value of the norm.
    pub lhs: f64,
    pub lhs_lo: f64,
    pub lhs_hi: f64,
    /// `(|A| |B| |C|)^{1/2}`
    pub rhs: f64,
    pub ratio: f64,
    pub ratio_lo: f64,
    pub ratio_hi: f64,
    /// `t * max |phase|`; below `pi / 3` the cosine stays above `1/2`.
    pub phase_bound: f64,
}

/// Norm of the time-integrated trilinear expression over the family's indicator data.
pub fn c3_derivative_norm(
    family: C3Family,
    component: Component,
    params: &ModelParams,
    n: f64,
    t: f64,
    eps_loc: f64,
) -> Result<C3Report> {
    let setup = C3Setup::new(family, component, params, n, t, eps_loc)?;
    Ok(c3_evaluate(&setup))
}

pub fn c3_evaluate(setup: &C3Setup) -> C3Report {
    let widths: Vec<f64> = setup.sets.iter().map(Interval::halfwidth).collect();
    let conv = box_convolution_l2(&widths).expect("positive widths");
    let rhs: f64 = setup.sets.iter().map(|s| s.width().sqrt()).product();
    let t = setup.t;
    let x_max = t * setup.phase_range().mag();
    let (k_lo, k_hi) = setup.kernel_range();
    // sin(x)/x is decreasing on [0, pi]
    let sinc = if x_max < 1e-12 { 1.0 } else if x_max < std::f64::consts::PI { x_max.sin() / x_max } else { 0.0 };
    let lhs_lo = t * sinc * k_lo * conv;
    let lhs_hi = t * k_hi * conv;
    let [a, b, c] = setup.sets.map(|s| s.center());
    let central = setup.kernel(a, b, c) * time_integral(t, setup.phase(a, b, c)) * conv;
    let lhs = central.clamp(lhs_lo, lhs_hi);
    let ratio = |v: f64| if rhs > 0.0 { v / rhs } else { 0.0 };
    C3Report {
        setup: *setup,
        lhs,
        lhs_lo,
        lhs_hi,
        rhs,
        ratio: ratio(lhs),
        ratio_lo: ratio(lhs_lo),
        ratio_hi: ratio(lhs_hi),
        phase_bound: x_max,
    }
}

/// Nested Gauss evaluation of the same norm with the exact kernel and phase; panels
/// break wherever the `xi_2` range meets a set boundary.
pub fn c3_oracle(setup: &C3Setup) -> f64 {
    let [a, b, c] = setup.sets;
    let t = setup.t;
    let inner = |xi: f64| -> f64 {
        let mut br = vec![a.lo, a.hi];
        for be in [b.lo, b.hi] {
            for ce in [c.lo, c.hi] {
                let x = xi - be - ce;
                if x > a.lo && x < a.hi {
                    br.push(x);
                }
            }
        }
        br.sort_by(f64::total_cmp);
        br.dedup();
        gauss_breaks(&br, |x1| {
            let lo = b.lo.max(xi - x1 - c.hi);
            let hi = b.hi.min(xi - x1 - c.lo);
            if hi <= lo {
                return 0.0;
            }
            gauss_panel(lo, hi, |x2| {
                let x3 = xi - x1 - x2;
                setup.kernel(x1, x2, x3) * time_integral(t, setup.phase(x1, x2, x3))
            })
        })
    };
    let mut outer = Vec::with_capacity(8);
    for ae in [a.lo, a.hi] {
        for be in [b.lo, b.hi] {
            for ce in [c.lo, c.hi] {
                outer.push(ae + be + ce);
            }
        }
    }
    outer.sort_by(f64::total_cmp);
    outer.dedup();
    gauss_breaks(&outer, |xi| inner(xi).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: f64, k: f64) -> ModelParams {
        ModelParams::trilinear_preset(2.0, s, k, 0.1).unwrap()
    }

    #[test]
    fn zero_time_gives_zero() {
        let r = c3_derivative_norm(C3Family::Highfreq, Component::V, &p(3.0, 0.0), 8.0, 0.0, 0.1).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.ratio, 0.0);
        let r = c3_derivative_norm(C3Family::Resonant, Component::W, &p(0.0, -1.0), 8.0, 0.0, 0.1).unwrap();
        assert_eq!(r.lhs, 0.0);
    }

    #[test]
    fn oracle_inside_bracket() {
        for fam in [C3Family::Highfreq, C3Family::Resonant] {
            for comp in [Component::V, Component::W] {
                for n in [2.0, 4.0, 8.0] {
                    let s = C3Setup::new(fam, comp, &p(3.0, -1.0), n, 1.0, 0.1).unwrap();
                    let rep = c3_evaluate(&s);
                    let o = c3_oracle(&s);
                    assert!(
                        o >= rep.lhs_lo * (1.0 - 1e-9) && o <= rep.lhs_hi * (1.0 + 1e-9),
                        "{fam:?} {comp:?} N={n}: oracle {o} bracket [{}, {}]",
                        rep.lhs_lo,
                        rep.lhs_hi
                    );
                    assert!(rep.phase_bound < std::f64::consts::PI / 3.0, "{fam:?} {comp:?} {}", rep.phase_bound);
                }
            }
        }
    }

    #[test]
    fn oracle_matches_constant_kernel() {
        // s = k = 0 with a resonant ray: the kernel is |xi| and the phase almost vanishes
        let s = C3Setup::new(C3Family::Resonant, Component::V, &p(0.0, 0.0), 4.0, 1.0, 1e-3).unwrap();
        let rep = c3_evaluate(&s);
        let o = c3_oracle(&s);
        assert!((o / rep.lhs - 1.0).abs() < 1e-3, "{o} {}", rep.lhs);
    }

    #[test]
    fn phase_range_encloses_samples() {
        for fam in [C3Family::Highfreq, C3Family::Resonant] {
            let s = C3Setup::new(fam, Component::V, &p(1.0, 0.0), 64.0, 1.0, 0.1).unwrap();
            let r = s.phase_range();
            for u in [0.0, 0.3, 1.0] {
                for v in [0.0, 0.7, 1.0] {
                    for w in [0.0, 0.5, 1.0] {
                        let x = [u, v, w];
                        let pts: Vec<f64> = (0..3).map(|i| s.sets[i].lo + x[i] * s.sets[i].width()).collect();
                        assert!(r.contains(s.phase(pts[0], pts[1], pts[2])));
                    }
                }
            }
        }
    }

    #[test]
    fn resonant_needs_constants() {
        let bad = ModelParams::trilinear_preset(2.0, 0.0, 0.0, 0.1).unwrap();
        assert!(C3Setup::new(C3Family::Resonant, Component::V, &bad, 8.0, 1.0, 0.0).is_err());
    }
}
