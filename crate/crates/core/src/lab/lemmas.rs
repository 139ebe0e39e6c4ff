// SPDX-License-Identifier: Apache-2.0

//! Numerical checks of one-dimensional integral bounds, with certified truncation.

use serde::{Deserialize, Serialize};

use super::interval::Cubic;
use super::quadrature::adaptive_breaks;
use crate::error::{Error, Result};
use crate::spectral::bracket;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum LemmaCase {
    /// `int <x - alpha>^{-a} <x - beta>^{-b} dx <~ <alpha - beta>^{-c}`, `c = min(a, b, a + b - 1)`.
    ShiftedBrackets { a: f64, b: f64, alpha: f64, beta: f64 },
    /// `int <a (x^2 - eta^2)>^{-b} dx <~ 1 / |a eta|`.
    Quadratic { a: f64, eta: f64, b: f64 },
    /// `int |x + sign eta| / <a (x^2 + sign eta^2)>^{b} dx <~ 1 / |a|`.
    WeightedQuadratic { a: f64, eta: f64, b: f64, sign: f64 },
    /// `int <x^3 + a2 x^2 + a1 x + a0>^{-l} dx <~ 1`.
    Cubic { a2: f64, a1: f64, a0: f64, l: f64 },
    /// `int <xi - x> <x>^{-2s} <tau - (xi - x)^3 - alpha x^3>^{-(1 - 4 eps)} dx <~ 1`.
    SupIntegral { alpha: f64, s: f64, eps: f64, xi: f64, tau: f64 },
}

/// Per-case integrand data: the integrand, its claimed bound, points where it
/// peaks (with a local width), and a tail majorant valid beyond `tail_start`.
struct Prepared {
    f: Box<dyn Fn(f64) -> f64>,
    bound: f64,
    peaks: Vec<(f64, f64)>,
    tail_start: f64,
    /// `X -> bound on int_{|x| > X} f`, valid for `X >= tail_start`.
    tail: Box<dyn Fn(f64) -> f64>,
}

fn prepare(case: &LemmaCase) -> Result<Prepared> {
    let fail = |m: &str| Err(Error::HypothesisViolated(m.into()));
    match *case {
        LemmaCase::ShiftedBrackets { a, b, alpha, beta } => {
            if !(a > 0.0 && b > 0.0 && a + b > 1.0) {
                return fail("need a, b > 0 and a + b > 1");
            }
            let c = a.min(b).min(a + b - 1.0);
            let m = alpha.abs().max(beta.abs());
            let p = a + b;
            Ok(Prepared {
                f: Box::new(move |x| bracket(x - alpha).powf(-a) * bracket(x - beta).powf(-b)),
                bound: bracket(alpha - beta).powf(-c),
                peaks: vec![(alpha, 1.0), (beta, 1.0)],
                tail_start: m + 1.0,
                // <x - alpha> >= |x| - m on each side
                tail: Box::new(move |x| 2.0 * (x - m).powf(1.0 - p) / (p - 1.0)),
            })
        }
        LemmaCase::Quadratic { a, eta, b } => {
            if a == 0.0 || eta == 0.0 || !(b > 1.0) {
                return fail("need a, eta != 0 and b > 1");
            }
            let w = 1.0 / (2.0 * (a * eta).abs()).max(1e-300);
            Ok(Prepared {
                f: Box::new(move |x| bracket(a * (x * x - eta * eta)).powf(-b)),
                bound: 1.0 / (a * eta).abs(),
                peaks: vec![(-eta, w), (eta, w), (0.0, w)],
                tail_start: 2f64.sqrt() * eta.abs(),
                // |a (x^2 - eta^2)| >= |a| x^2 / 2
                tail: Box::new(move |x| 2.0 * (2.0 / a.abs()).powf(b) * x.powf(1.0 - 2.0 * b) / (2.0 * b - 1.0)),
            })
        }
        LemmaCase::WeightedQuadratic { a, eta, b, sign } => {
            if a == 0.0 || eta == 0.0 || !(b > 1.0) || sign.abs() != 1.0 {
                return fail("need a, eta != 0, b > 1 and sign = +-1");
            }
            let w = 1.0 / (2.0 * (a * eta).abs()).max(1e-300);
            Ok(Prepared {
                f: Box::new(move |x| (x + sign * eta).abs() / bracket(a * (x * x + sign * eta * eta)).powf(b)),
                bound: 1.0 / a.abs(),
                peaks: vec![(-eta, w), (eta, w), (0.0, w)],
                tail_start: 2f64.sqrt() * eta.abs(),
                // |x + eta| <= 2|x| and |a (x^2 +- eta^2)| >= |a| x^2 / 2
                tail: Box::new(move |x| 4.0 * (2.0 / a.abs()).powf(b) * x.powf(2.0 - 2.0 * b) / (2.0 * b - 2.0)),
            })
        }
        LemmaCase::Cubic { a2, a1, a0, l } => {
            if !(l > 1.0 / 3.0) {
                return fail("need l > 1/3");
            }
            let p = Cubic { a3: 1.0, a2, a1, a0 };
            let sum = a2.abs() + a1.abs() + a0.abs();
            Ok(Prepared {
                f: Box::new(move |x| bracket(p.eval(x)).powf(-l)),
                bound: 1.0,
                peaks: root_peaks(&p),
                tail_start: (2.0 * sum).max(1.0),
                // |p(x)| >= |x|^3 / 2 there
                tail: Box::new(move |x| 2.0 * 2f64.powf(l) * x.powf(1.0 - 3.0 * l) / (3.0 * l - 1.0)),
            })
        }
        LemmaCase::SupIntegral { alpha, s, eps, xi, tau } => {
            if !(alpha < 1.0 && alpha != 0.0) {
                return fail("need alpha < 1, alpha != 0");
            }
            if !(s > -0.5) {
                return fail("need s > -1/2");
            }
            if !(eps > 0.0 && eps < ((2.0 * s + 1.0) / 15.0).min(1.0 / 6.0)) {
                return fail("need 0 < eps < min((2s + 1)/15, 1/6)");
            }
            let e = 1.0 - 4.0 * eps;
            // H(x) = tau - (xi - x)^3 - alpha x^3
            let h = Cubic { a3: 1.0 - alpha, a2: -3.0 * xi, a1: 3.0 * xi * xi, a0: tau - xi.powi(3) };
            let lower = h.a2.abs() + h.a1.abs() + h.a0.abs();
            let lead = (1.0 - alpha).abs();
            let cs = if s >= 0.0 { 1.0 } else { 2f64.powf(-2.0 * s) };
            let k = 3.0 * cs * (lead / 2.0).powf(-e);
            let pw = 2.0 * s + 3.0 * e - 1.0;
            Ok(Prepared {
                f: Box::new(move |x| bracket(xi - x) * bracket(x).powf(-2.0 * s) * bracket(h.eval(x)).powf(-e)),
                bound: 1.0,
                peaks: root_peaks(&h).into_iter().chain([(0.0, 1.0), (xi, 1.0)]).collect(),
                tail_start: 1f64.max(xi.abs()).max(2.0 * lower / lead),
                // <xi - x> <= 3|x|, <x>^{-2s} <= cs |x|^{-2s}, |H| >= lead |x|^3 / 2
                tail: Box::new(move |x| 2.0 * k * x.powf(1.0 - pw) / (pw - 1.0)),
            })
        }
    }
}

/// Roots of a cubic with the width over which `<p>` changes by O(1).
fn root_peaks(p: &Cubic) -> Vec<(f64, f64)> {
    p.real_roots()
        .into_iter()
        .map(|r| {
            let d = p.taylor(r)[1].abs();
            (r, if d > 1.0 { 1.0 / d } else { 1.0 })
        })
        .collect()
}

/// Breakpoints inside `[lo, hi]`: dyadic shells around the origin and around each peak.
fn breakpoints(peaks: &[(f64, f64)], lo: f64, hi: f64) -> Vec<f64> {
    let mut br = vec![lo, hi, 0.0];
    let mut r = 1.0;
    while r < hi.max(-lo) {
        br.extend([r, -r]);
        r *= 2.0;
    }
    for &(c, w) in peaks {
        br.push(c);
        let mut d = w;
        while d < 2.0 * (hi - lo) {
            br.extend([c - d, c + d]);
            d *= 2.0;
        }
    }
    br.retain(|x| *x >= lo && *x <= hi && x.is_finite());
    br.sort_by(f64::total_cmp);
    br.dedup();
    br
}

pub const TAIL_FRACTION: f64 = 1e-3;
const MAX_DOUBLINGS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralCheck {
    pub case: LemmaCase,
    /// Integral over `[-X, X]`.
    pub value: f64,
    pub bound: f64,
    /// `value / bound`.
    pub ratio: f64,
    pub truncation: f64,
    /// Certified bound on the discarded tail.
    pub tail_bound: f64,
    pub doublings: usize,
    /// Relative change of the value after one more doubling of `X`.
    pub doubled_change: f64,
    pub quadrature_error: f64,
}

/// Integrate one case on `[-X, X]`, doubling `X` until the tail majorant drops
/// below `TAIL_FRACTION` of the value.
pub fn integral_check(case: &LemmaCase) -> Result<IntegralCheck> {
    let prep = prepare(case)?;
    let reach = prep.peaks.iter().map(|(c, w)| c.abs() + w).fold(0.0, f64::max);
    let mut x = prep.tail_start.max(reach).max(1.0) * 2.0;
    let integrate = |lo: f64, hi: f64| adaptive_breaks(&*prep.f, &breakpoints(&prep.peaks, lo, hi), 1e-11, 1e-300);
    let first = integrate(-x, x);
    let (mut value, mut qerr) = (first.value, first.error);
    let mut doublings = 0;
    loop {
        let tail = (prep.tail)(x);
        if tail < TAIL_FRACTION * value {
            let extra = integrate(-2.0 * x, -x).value + integrate(x, 2.0 * x).value;
            return Ok(IntegralCheck {
                case: *case,
                value,
                bound: prep.bound,
                ratio: value / prep.bound,
                truncation: x,
                tail_bound: tail,
                doublings,
                doubled_change: extra / value,
                quadrature_error: qerr,
            });
        }
        if doublings == MAX_DOUBLINGS {
            return Err(Error::TailNotConverged { doublings, ratio: tail / value });
        }
        let left = integrate(-2.0 * x, -x);
        let right = integrate(x, 2.0 * x);
        value += left.value + right.value;
        qerr += left.error + right.error;
        x *= 2.0;
        doublings += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaSweep {
    pub entries: Vec<IntegralCheck>,
    pub sup_ratio: f64,
    /// Largest relative change under one extra doubling.
    pub max_doubled_change: f64,
}

pub fn integral_bound_check(cases: &[LemmaCase]) -> Result<LemmaSweep> {
    if cases.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let entries = cases.iter().map(integral_check).collect::<Result<Vec<_>>>()?;
    let sup_ratio = entries.iter().map(|e| e.ratio).fold(0.0, f64::max);
    let max_doubled_change = entries.iter().map(|e| e.doubled_change).fold(0.0, f64::max);
    Ok(LemmaSweep { entries, sup_ratio, max_doubled_change })
}

/// The `(xi, tau)` grid for the sup-integral case.
pub fn sup_integral_grid(alpha: f64, s: f64, eps: f64, xis: &[f64], taus: &[f64]) -> Vec<LemmaCase> {
    xis.iter()
        .flat_map(|&xi| taus.iter().map(move |&tau| LemmaCase::SupIntegral { alpha, s, eps, xi, tau }))
        .collect()
}
