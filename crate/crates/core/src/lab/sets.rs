// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::interval::{Cubic, Interval};
use crate::error::{Error, Result};
use crate::spectral::WeightSpec;

/// Axis-aligned rectangle in the `(xi, tau)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreqRect {
    pub xi_center: f64,
    pub tau_center: f64,
    pub xi_halfwidth: f64,
    pub tau_halfwidth: f64,
}

impl FreqRect {
    pub fn new(xi_center: f64, tau_center: f64, xi_halfwidth: f64, tau_halfwidth: f64) -> Result<Self> {
        let r = Self { xi_center, tau_center, xi_halfwidth, tau_halfwidth };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.xi_center, self.tau_center, self.xi_halfwidth, self.tau_halfwidth];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("rectangle"));
        }
        if !(self.xi_halfwidth > 0.0 && self.tau_halfwidth > 0.0) {
            return Err(Error::InvalidParameter("rectangle halfwidths must be positive".into()));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        4.0 * self.xi_halfwidth * self.tau_halfwidth
    }

    pub fn xi(&self) -> Interval {
        Interval::centered(self.xi_center, self.xi_halfwidth)
    }

    pub fn tau(&self) -> Interval {
        Interval::centered(self.tau_center, self.tau_halfwidth)
    }

    pub fn scaled(&self, xi_factor: f64, tau_factor: f64) -> Self {
        Self {
            xi_center: self.xi_center * xi_factor,
            tau_center: self.tau_center * tau_factor,
            xi_halfwidth: self.xi_halfwidth * xi_factor,
            tau_halfwidth: self.tau_halfwidth * tau_factor,
        }
    }
}

/// `{(xi, tau) : xi in xi_range, tau - curve(xi) in sigma}`.
///
/// A plain rectangle is the case of a constant curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slab {
    pub xi: Interval,
    pub curve: Cubic,
    pub sigma: Interval,
}

impl From<FreqRect> for Slab {
    fn from(r: FreqRect) -> Self {
        Slab {
            xi: r.xi(),
            curve: Cubic::constant(r.tau_center),
            sigma: Interval::centered(0.0, r.tau_halfwidth),
        }
    }
}

impl Slab {
    pub fn new(xi: Interval, curve: Cubic, sigma: Interval) -> Result<Self> {
        let s = Self { xi, curve, sigma };
        if !(xi.width() > 0.0 && sigma.width() > 0.0) {
            return Err(Error::InvalidParameter("slab must have positive widths".into()));
        }
        let c = [xi.lo, xi.hi, sigma.lo, sigma.hi, curve.a0, curve.a1, curve.a2, curve.a3];
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("slab"));
        }
        Ok(s)
    }

    /// Slab `|xi - xi_c| < wx`, `|tau - c xi^3| < ws` around a dispersion curve.
    pub fn on_curve(xi_center: f64, xi_halfwidth: f64, curve: Cubic, sigma_halfwidth: f64) -> Result<Self> {
        Self::new(
            Interval::centered(xi_center, xi_halfwidth),
            curve,
            Interval::centered(0.0, sigma_halfwidth),
        )
    }

    /// Shear preserves area.
    pub fn area(&self) -> f64 {
        self.xi.width() * self.sigma.width()
    }

    pub fn is_rect(&self) -> bool {
        self.curve.is_constant()
    }

    pub fn contains(&self, xi: f64, tau: f64) -> bool {
        self.xi.contains(xi) && self.sigma.contains(tau - self.curve.eval(xi))
    }

    /// Map local coordinates in `[0, 1]^2` to a point of the slab.
    pub fn point(&self, u: f64, v: f64) -> (f64, f64) {
        let xi = self.xi.lo + u * self.xi.width();
        let tau = self.curve.eval(xi) + self.sigma.lo + v * self.sigma.width();
        (xi, tau)
    }

    pub fn center(&self) -> (f64, f64) {
        self.point(0.5, 0.5)
    }

    /// Range of `tau - c xi^3` over the slab.
    pub fn modulation(&self, c: f64) -> Interval {
        cubic_range(&(self.curve - Cubic::dispersion(c)), &self.xi) + self.sigma
    }

    pub fn bounding_box(&self) -> FreqRect {
        let tau = cubic_range(&self.curve, &self.xi) + self.sigma;
        FreqRect {
            xi_center: self.xi.center(),
            tau_center: tau.center(),
            xi_halfwidth: self.xi.halfwidth(),
            tau_halfwidth: tau.halfwidth(),
        }
    }

    /// Same widths in `(xi, sigma)` with the shear removed.
    pub fn straightened(&self) -> FreqRect {
        let (xc, tc) = self.center();
        FreqRect { xi_center: xc, tau_center: tc, xi_halfwidth: self.xi.halfwidth(), tau_halfwidth: self.sigma.halfwidth() }
    }

    /// Largest-area axis-aligned rectangle found among centred sub-strips.
    pub fn inner_rect(&self) -> Option<FreqRect> {
        if self.is_rect() {
            return Some(self.bounding_box());
        }
        let (xc, hw) = (self.xi.center(), self.xi.halfwidth());
        let mut best: Option<FreqRect> = None;
        for i in 1..=64 {
            let u = hw * i as f64 / 64.0;
            let p = cubic_range(&self.curve, &Interval::centered(xc, u));
            let lo = p.hi + self.sigma.lo;
            let hi = p.lo + self.sigma.hi;
            if hi > lo {
                let r = FreqRect { xi_center: xc, tau_center: 0.5 * (lo + hi), xi_halfwidth: u, tau_halfwidth: 0.5 * (hi - lo) };
                if best.is_none_or(|b| r.area() > b.area()) {
                    best = Some(r);
                }
            }
        }
        best
    }

    /// Range of a product weight over the slab.
    pub fn weight_range(&self, w: &WeightSpec) -> (f64, f64) {
        let m = self.modulation(w.dispersion);
        w.range((self.xi.mig(), self.xi.mag()), (m.mig(), m.mag()))
    }

    /// Frozen value: frequency factor at the centre, modulation factor at the
    /// largest modulation the set reaches.
    pub fn weight_frozen(&self, w: &WeightSpec) -> f64 {
        w.eval_at_modulation(self.xi.center(), self.modulation(w.dispersion).mag())
    }

    pub fn translate(&self, dxi: f64, dtau: f64) -> Self {
        // p(xi - dxi) + dtau
        let c = &self.curve;
        let shifted = Cubic {
            a3: c.a3,
            a2: c.a2 - 3.0 * c.a3 * dxi,
            a1: c.a1 - 2.0 * c.a2 * dxi + 3.0 * c.a3 * dxi * dxi,
            a0: c.eval(-dxi) + dtau,
        };
        Self { xi: Interval::new(self.xi.lo + dxi, self.xi.hi + dxi), curve: shifted, sigma: self.sigma }
    }
}

/// Exact range of a cubic over an interval (endpoints and interior critical points).
pub fn cubic_range(p: &Cubic, x: &Interval) -> Interval {
    let mut lo = p.eval(x.lo).min(p.eval(x.hi));
    let mut hi = p.eval(x.lo).max(p.eval(x.hi));
    // p'(x) = 3 a3 x^2 + 2 a2 x + a1
    let (a, b, c) = (3.0 * p.a3, 2.0 * p.a2, p.a1);
    let mut crit = Vec::with_capacity(2);
    if a != 0.0 {
        let d = b * b - 4.0 * a * c;
        if d >= 0.0 {
            let q = -0.5 * (b + b.signum() * d.sqrt());
            if q != 0.0 {
                crit.push(q / a);
                crit.push(c / q);
            } else {
                crit.push(0.0);
            }
        }
    } else if b != 0.0 {
        crit.push(-c / b);
    }
    for t in crit {
        if x.contains(t) {
            let v = p.eval(t);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Interval::new(lo, hi)
}

/// Enclosure of the image `sum_i sign_i * set_i` seen through a target curve:
/// returns the `xi` range and the range of `tau - target(xi)`.
///
/// Expands every curve around its set centre so that the large cubic terms
/// cancel before interval evaluation; only the quadratic and cubic remainders
/// are overestimated.
pub fn image_bounds(inputs: &[(f64, &Slab)], target: &Cubic) -> (Interval, Interval, f64) {
    let big_c: f64 = inputs.iter().map(|(s, set)| s * set.xi.center()).sum();
    let t_target = target.taylor(big_c);
    let mut xi = Interval::point(0.0);
    let mut delta = Interval::point(0.0);
    let mut constant = -t_target[0];
    let mut magnitude = t_target[0].abs();
    let mut sigma = Interval::point(0.0);
    for &(s, set) in inputs {
        let c = set.xi.center();
        let d = Interval::centered(0.0, set.xi.halfwidth());
        let t = set.curve.taylor(c);
        xi = xi + set.xi.scale(s);
        delta = delta + d.scale(s);
        constant += s * t[0];
        magnitude += t[0].abs();
        sigma = sigma + set.sigma.scale(s);
        sigma = sigma + d.scale(s * (t[1] - t_target[1]));
        sigma = sigma + d.sqr().scale(s * t[2]) + d.cube().scale(s * t[3]);
    }
    sigma = sigma - (delta.sqr().scale(t_target[2]) + delta.cube().scale(t_target[3]));
    sigma = sigma + Interval::point(constant);
    // absolute roundoff scale of the cancelled constant part
    let slack = 1e-12 * magnitude.max(1.0);
    (xi, sigma.widen(slack), slack)
}

/// Checks `sum_i sign_i * set_i` lies in `target`; `Err(ContainmentViolated)` otherwise.
pub fn verify_containment(inputs: &[(f64, &Slab)], target: &Slab, label: &str) -> Result<()> {
    let (xi, sigma, slack) = image_bounds(inputs, &target.curve);
    let tol_xi = 1e-12 * xi.mag().max(1.0);
    if xi.within(&target.xi, tol_xi) && sigma.within(&target.sigma, 4.0 * slack) {
        Ok(())
    } else {
        Err(Error::ContainmentViolated(format!(
            "{label}: image xi {:?} sigma {:?} not inside xi {:?} sigma {:?}",
            xi, sigma, target.xi, target.sigma
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rect_roundtrip() {
        let r = FreqRect::new(2.0, 5.0, 0.5, 1.5).unwrap();
        let s = Slab::from(r);
        assert_eq!(s.area(), r.area());
        assert_eq!(s.bounding_box(), r);
        assert_eq!(s.inner_rect().unwrap(), r);
        assert!(s.contains(2.4, 6.4));
        assert!(!s.contains(2.6, 5.0));
    }

    #[test]
    fn cubic_range_finds_interior_extrema() {
        let p = Cubic { a3: 1.0, a2: 0.0, a1: -3.0, a0: 0.0 }; // extrema at +-1 with values -+2
        let r = cubic_range(&p, &Interval::new(-1.5, 1.5));
        assert!((r.lo + 2.0).abs() < 1e-14 && (r.hi - 2.0).abs() < 1e-14);
    }

    #[test]
    fn inner_rect_is_inside() {
        let s = Slab::on_curve(3.0, 0.05, Cubic::dispersion(1.0), 1.0).unwrap();
        let r = s.inner_rect().unwrap();
        for (u, v) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (0.5, 0.5)] {
            let xi = r.xi_center - r.xi_halfwidth + 2.0 * u * r.xi_halfwidth;
            let tau = r.tau_center - r.tau_halfwidth + 2.0 * v * r.tau_halfwidth;
            assert!(s.contains(xi, tau - 1e-12 * (v - 0.5).signum()) || s.contains(xi, tau));
        }
        assert!(r.area() <= s.area());
    }

    #[test]
    fn translate_moves_every_point() {
        let s = Slab::on_curve(1.0, 0.2, Cubic { a3: 2.0, a2: -1.0, a1: 0.5, a0: 0.3 }, 0.4).unwrap();
        let t = s.translate(0.7, -2.0);
        for (u, v) in [(0.1, 0.2), (0.9, 0.7)] {
            let (x, y) = s.point(u, v);
            assert!(t.contains(x + 0.7, y - 2.0 + 1e-13) || t.contains(x + 0.7, y - 2.0 - 1e-13));
        }
    }

    #[test]
    fn containment_catches_violation() {
        let a = Slab::from(FreqRect::new(0.0, 0.0, 1.0, 1.0).unwrap());
        let b = Slab::from(FreqRect::new(0.0, 0.0, 0.5, 0.5).unwrap());
        let r = b;
        assert!(verify_containment(&[(1.0, &r), (-1.0, &b)], &a, "ok").is_ok());
        let small = Slab::from(FreqRect::new(0.0, 0.0, 0.9, 1.0).unwrap());
        assert!(matches!(
            verify_containment(&[(1.0, &r), (-1.0, &b)], &small, "bad"),
            Err(Error::ContainmentViolated(_))
        ));
    }

    proptest! {
        // random points of the inputs land inside the enclosure
        #[test]
        fn image_bounds_enclose_samples(
            c1 in -3.0f64..3.0, c2 in -3.0f64..3.0, w1 in 0.01f64..0.3, w2 in 0.01f64..0.3,
            a in -2.0f64..2.0, u1 in 0.0f64..1.0, v1 in 0.0f64..1.0, u2 in 0.0f64..1.0, v2 in 0.0f64..1.0,
        ) {
            let s1 = Slab::on_curve(c1, w1, Cubic::dispersion(a), 0.5).unwrap();
            let s2 = Slab::on_curve(c2, w2, Cubic { a3: 1.0, a2: 0.3, a1: 0.0, a0: -1.0 }, 0.2).unwrap();
            let target = Cubic::dispersion(1.5);
            let (xi, sigma, _) = image_bounds(&[(1.0, &s1), (-1.0, &s2)], &target);
            let (x1, t1) = s1.point(u1, v1);
            let (x2, t2) = s2.point(u2, v2);
            let x = x1 - x2;
            let t = t1 - t2;
            prop_assert!(xi.widen(1e-12).contains(x));
            prop_assert!(sigma.widen(1e-9).contains(t - target.eval(x)));
        }
    }
}
