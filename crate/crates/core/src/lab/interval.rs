// SPDX-License-Identifier: Apache-2.0

use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn centered(center: f64, halfwidth: f64) -> Self {
        Self::new(center - halfwidth, center + halfwidth)
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn halfwidth(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Largest absolute value.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value.
    pub fn mig(&self) -> f64 {
        if self.lo <= 0.0 && self.hi >= 0.0 {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn abs(&self) -> Self {
        Self::new(self.mig(), self.mag())
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `self` inside `outer` up to an absolute slack.
    pub fn within(&self, outer: &Self, slack: f64) -> bool {
        self.lo >= outer.lo - slack && self.hi <= outer.hi + slack
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn scale(&self, c: f64) -> Self {
        if c >= 0.0 {
            Self::new(c * self.lo, c * self.hi)
        } else {
            Self::new(c * self.hi, c * self.lo)
        }
    }

    pub fn widen(&self, slack: f64) -> Self {
        Self::new(self.lo - slack, self.hi + slack)
    }

    pub fn sqr(&self) -> Self {
        Self::new(self.mig().powi(2), self.mag().powi(2))
    }

    /// Cube is monotone, so the endpoints map directly.
    pub fn cube(&self) -> Self {
        Self::new(self.lo.powi(3), self.hi.powi(3))
    }

    /// Image under a monotone increasing map.
    pub fn map_increasing(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(f(self.lo), f(self.hi))
    }
}

impl Add for Interval {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.lo + o.lo, self.hi + o.hi)
    }
}

impl Sub for Interval {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.lo - o.hi, self.hi - o.lo)
    }
}

impl Neg for Interval {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        Self::new(p.iter().copied().fold(f64::INFINITY, f64::min), p.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }
}

/// Cubic `a3 x^3 + a2 x^2 + a1 x + a0` describing the centre line of a slab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cubic {
    pub a3: f64,
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl Cubic {
    pub const ZERO: Cubic = Cubic { a3: 0.0, a2: 0.0, a1: 0.0, a0: 0.0 };

    pub fn constant(c: f64) -> Self {
        Self { a0: c, ..Self::ZERO }
    }

    /// `c x^3`, the characteristic curve of `U^c`.
    pub fn dispersion(c: f64) -> Self {
        Self { a3: c, ..Self::ZERO }
    }

    pub fn eval(&self, x: f64) -> f64 {
        ((self.a3 * x + self.a2) * x + self.a1) * x + self.a0
    }

    /// Taylor coefficients `(p(c), p'(c), p''(c)/2, p'''(c)/6)` at `c`.
    pub fn taylor(&self, c: f64) -> [f64; 4] {
        [
            self.eval(c),
            (3.0 * self.a3 * c + 2.0 * self.a2) * c + self.a1,
            3.0 * self.a3 * c + self.a2,
            self.a3,
        ]
    }

    pub fn is_constant(&self) -> bool {
        self.a3 == 0.0 && self.a2 == 0.0 && self.a1 == 0.0
    }

    /// Real roots in increasing order, by bisection between critical points.
    /// Touching roots are reported when the polynomial vanishes at a critical point.
    pub fn real_roots(&self) -> Vec<f64> {
        let c = [self.a0, self.a1, self.a2, self.a3];
        let Some(deg) = (1..=3).rev().find(|&d| c[d] != 0.0) else { return Vec::new() };
        let lead = c[deg].abs();
        let bound = 1.0 + c[..deg].iter().map(|v| v.abs() / lead).fold(0.0, f64::max);
        // critical points: roots of 3 a3 x^2 + 2 a2 x + a1
        let mut crit: Vec<f64> = match deg {
            3 => {
                let (qa, qb, qc) = (3.0 * self.a3, 2.0 * self.a2, self.a1);
                let disc = qb * qb - 4.0 * qa * qc;
                if disc < 0.0 {
                    vec![]
                } else {
                    let q = -0.5 * (qb + qb.signum() * disc.sqrt());
                    let mut v = vec![q / qa];
                    if q != 0.0 {
                        v.push(qc / q);
                    }
                    v
                }
            }
            2 => vec![-self.a1 / (2.0 * self.a2)],
            _ => vec![],
        };
        crit.retain(|x| x.is_finite() && x.abs() < bound);
        crit.sort_by(f64::total_cmp);
        let mut knots = vec![-bound];
        knots.extend(&crit);
        knots.push(bound);
        let scale = c.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let mut roots: Vec<f64> = Vec::new();
        for w in knots.windows(2) {
            let (mut lo, mut hi) = (w[0], w[1]);
            let (flo, fhi) = (self.eval(lo), self.eval(hi));
            if flo == 0.0 || fhi == 0.0 || flo.signum() == fhi.signum() {
                continue;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.eval(mid).signum() == flo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        for &x in &crit {
            let tol = 1e-12 * scale * (1.0 + x.abs()).powi(deg as i32);
            if self.eval(x).abs() <= tol {
                roots.push(x);
            }
        }
        roots.sort_by(f64::total_cmp);
        roots
    }
}

impl Sub for Cubic {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { a3: self.a3 - o.a3, a2: self.a2 - o.a2, a1: self.a1 - o.a1, a0: self.a0 - o.a0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn arithmetic() {
        let a = Interval::new(-1.0, 2.0);
        let b = Interval::new(3.0, 4.0);
        assert_eq!(a + b, Interval::new(2.0, 6.0));
        assert_eq!(a - b, Interval::new(-5.0, -1.0));
        assert_eq!(a * b, Interval::new(-4.0, 8.0));
        assert_eq!(a.sqr(), Interval::new(0.0, 4.0));
        assert_eq!(a.cube(), Interval::new(-1.0, 8.0));
        assert_eq!(a.mig(), 0.0);
        assert_eq!(b.mig(), 3.0);
    }

    #[test]
    fn cubic_roots() {
        // (x - 1)(x + 2)(x - 5)
        let p = Cubic { a3: 1.0, a2: -4.0, a1: -7.0, a0: 10.0 };
        let r = p.real_roots();
        assert_eq!(r.len(), 3);
        for (x, e) in r.iter().zip([-2.0, 1.0, 5.0]) {
            assert!((x - e).abs() < 1e-12);
        }
        let z = Cubic { a3: 1.0, a2: 0.0, a1: 1.0, a0: 0.0 }.real_roots();
        assert!(z.len() == 1 && z[0].abs() < 1e-12);
        // double root at 1 via the critical point
        let d = Cubic { a3: 1.0, a2: -2.0, a1: 1.0, a0: 0.0 }.real_roots();
        assert!(d.iter().any(|x| (x - 1.0).abs() < 1e-9) && d.iter().any(|x| x.abs() < 1e-12));
        assert!(Cubic::constant(3.0).real_roots().is_empty());
        let q = Cubic { a3: 0.0, a2: 1.0, a1: 0.0, a0: -4.0 }.real_roots();
        assert!((q[0] + 2.0).abs() < 1e-12 && (q[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn taylor_reconstructs() {
        let p = Cubic { a3: 2.0, a2: -1.0, a1: 0.5, a0: 3.0 };
        let t = p.taylor(1.5);
        let d = 0.3;
        let v = t[0] + t[1] * d + t[2] * d * d + t[3] * d * d * d;
        assert!((v - p.eval(1.8)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn enclosures_hold(a in -5.0f64..5.0, w in 0.0f64..3.0, b in -5.0f64..5.0, v in 0.0f64..3.0, s in 0.0f64..1.0, t in 0.0f64..1.0) {
            let x = Interval::new(a, a + w);
            let y = Interval::new(b, b + v);
            let px = a + s * w;
            let py = b + t * v;
            prop_assert!((x * y).widen(1e-12).contains(px * py));
            prop_assert!((x - y).widen(1e-12).contains(px - py));
            prop_assert!(x.cube().widen(1e-12).contains(px.powi(3)));
            prop_assert!(x.sqr().widen(1e-12).contains(px * px));
        }
    }
}
