// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which constant system is being solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ResonanceVariant {
    /// `c2 + c3 = 1`, `α c2³ + α c3³ = 1`.
    TwoConstAlpha,
    /// `c1 + c2 + c3 = 1`, `c1³ + α c2³ + α c3³ = 1`.
    ThreeConstV,
    /// Same system as `ThreeConstV`; positive constants are preferred when they exist.
    ThreeConstQ,
    /// `c1 + c2 + c3 = 1`, `c1³ + c2³ + α c3³ = 1`.
    ThreeConstP,
}

impl ResonanceVariant {
    pub const ALL: [Self; 4] = [Self::TwoConstAlpha, Self::ThreeConstV, Self::ThreeConstQ, Self::ThreeConstP];

    pub fn name(self) -> &'static str {
        match self {
            Self::TwoConstAlpha => "TwoConstAlpha",
            Self::ThreeConstV => "ThreeConstV",
            Self::ThreeConstQ => "ThreeConstQ",
            Self::ThreeConstP => "ThreeConstP",
        }
    }

    /// Cubic coefficients `(k1, k2, k3)` of the second defining equation.
    fn cubic_weights(self, alpha: f64) -> [f64; 3] {
        match self {
            Self::TwoConstAlpha => [0.0, alpha, alpha],
            Self::ThreeConstV | Self::ThreeConstQ => [1.0, alpha, alpha],
            Self::ThreeConstP => [1.0, 1.0, alpha],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceSystem {
    pub variant: ResonanceVariant,
    pub alpha: f64,
    pub constants: (f64, f64, f64),
    pub residual: f64,
}

impl ResonanceSystem {
    pub fn as_array(&self) -> [f64; 3] {
        let (a, b, c) = self.constants;
        [a, b, c]
    }
}

/// Max-norm residual of both defining equations.
pub fn resonance_residual(variant: ResonanceVariant, alpha: f64, c: [f64; 3]) -> f64 {
    let k = variant.cubic_weights(alpha);
    let sum = match variant {
        ResonanceVariant::TwoConstAlpha => c[1] + c[2] - 1.0,
        _ => c[0] + c[1] + c[2] - 1.0,
    };
    let cubic = k[0] * c[0].powi(3) + k[1] * c[1].powi(3) + k[2] * c[2].powi(3) - 1.0;
    sum.abs().max(cubic.abs())
}

/// Smallest admissible `|c_i|`; keeps every `<c_i N>` near its power law at moderate N.
const MIN_ABS: f64 = 0.3;
/// Positive triples with sum 1 cannot all be that large, so the positive pass allows less.
const MIN_ABS_POSITIVE: f64 = 0.05;
const MAX_ABS: f64 = 10.0;

/// Free-parameter lattice: 0.1, -0.1, 0.2, -0.2, ..., 10, -10.
fn lattice() -> impl Iterator<Item = f64> {
    (1..=100).flat_map(|j| {
        let x = j as f64 / 10.0;
        [x, -x]
    })
}

/// Solve `y + z = s`, `y³ + z³ = t` for a real pair `(y >= z)`.
fn pair_from_sums(s: f64, t: f64) -> Option<(f64, f64)> {
    if s.abs() < 1e-14 {
        // y = -z, so t must vanish and the pair is free
        return (t.abs() < 1e-14).then_some((0.5, -0.5));
    }
    let p = (s.powi(3) - t) / (3.0 * s);
    let disc = s * s - 4.0 * p;
    if disc < 0.0 {
        return None;
    }
    let root = disc.sqrt();
    // avoid cancellation in the smaller root
    let big = 0.5 * (s + s.signum() * root);
    let small = if big != 0.0 { p / big } else { 0.0 };
    Some(if big >= small { (big, small) } else { (small, big) })
}

/// Newton on `(y, z)` with the free constant held fixed.
fn polish(x: f64, pair: (f64, f64), kx: f64, beta: f64) -> (f64, f64) {
    let (mut y, mut z) = pair;
    for _ in 0..8 {
        let f1 = x + y + z - 1.0;
        let f2 = kx * x.powi(3) + beta * (y.powi(3) + z.powi(3)) - 1.0;
        let det = 3.0 * beta * (z * z - y * y);
        if det.abs() < 1e-12 {
            break;
        }
        // J = [[1, 1], [3βy², 3βz²]]
        let dy = (3.0 * beta * z * z * f1 - f2) / det;
        let dz = (f2 - 3.0 * beta * y * y * f1) / det;
        y -= dy;
        z -= dz;
        if dy.abs().max(dz.abs()) < 1e-17 {
            break;
        }
    }
    (y, z)
}

pub fn solve_resonance_constants(variant: ResonanceVariant, alpha: f64) -> Result<ResonanceSystem> {
    if !alpha.is_finite() || alpha == 0.0 || alpha == 1.0 {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} is excluded")));
    }
    let none = || Error::NoRealSolution { variant: variant.name().into(), alpha };
    let build = |c: [f64; 3]| ResonanceSystem {
        variant,
        alpha,
        constants: (c[0], c[1], c[2]),
        residual: resonance_residual(variant, alpha, c),
    };

    if variant == ResonanceVariant::TwoConstAlpha {
        // t² - t + (1 - 1/α)/3 = 0
        let p = (1.0 - 1.0 / alpha) / 3.0;
        let (c2, c3) = pair_from_sums(1.0, 1.0 / alpha).ok_or_else(none)?;
        debug_assert!((c2 * c3 - p).abs() < 1e-12);
        return Ok(build([0.0, c2, c3]));
    }

    // free constant x with cubic weight kx, remaining pair with weight beta
    let (kx, beta) = match variant {
        ResonanceVariant::ThreeConstP => (alpha, 1.0),
        _ => (1.0, alpha),
    };
    let arrange = |x: f64, y: f64, z: f64| match variant {
        ResonanceVariant::ThreeConstP => [y, z, x],
        _ => [x, y, z],
    };
    let admissible = |c: &[f64; 3], positive: bool| {
        let lo = if positive { MIN_ABS_POSITIVE } else { MIN_ABS };
        c.iter().all(|v| (lo..=MAX_ABS).contains(&v.abs())) && (!positive || c.iter().all(|v| *v > 0.0))
    };
    let passes: &[bool] = if variant == ResonanceVariant::ThreeConstQ { &[true, false] } else { &[false] };
    for &positive in passes {
        for x in lattice() {
            let s = 1.0 - x;
            let t = (1.0 - kx * x.powi(3)) / beta;
            let Some(pair) = pair_from_sums(s, t) else { continue };
            let (y, z) = polish(x, pair, kx, beta);
            let c = arrange(x, y, z);
            if admissible(&c, positive) && resonance_residual(variant, alpha, c) < 1e-12 {
                return Ok(build(c));
            }
        }
    }
    Err(none())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseKind {
    Q,
    P,
}

/// Cubic phase mismatch of the trilinear interaction, with `ξ3 = ξ - ξ1 - ξ2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceFunction {
    pub kind: PhaseKind,
    pub alpha: f64,
}

impl ResonanceFunction {
    pub fn new(kind: PhaseKind, alpha: f64) -> Self {
        Self { kind, alpha }
    }

    pub fn eval(&self, xi: f64, xi1: f64, xi2: f64) -> f64 {
        let xi3 = xi - xi1 - xi2;
        let a = self.alpha;
        match self.kind {
            PhaseKind::Q => xi.powi(3) - xi1.powi(3) - a * xi2.powi(3) - a * xi3.powi(3),
            PhaseKind::P => xi.powi(3) - xi1.powi(3) - xi2.powi(3) - a * xi3.powi(3),
        }
    }
}
