// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::sets::{verify_containment, FreqRect, Slab};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
struct Piece {
    x0: f64,
    x1: f64,
    /// `p(x) = sum_k coef[k] (x - x0)^k`
    coef: Vec<f64>,
}

/// Compactly supported piecewise polynomial on contiguous pieces, in local coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly {
    pieces: Vec<Piece>,
}

impl PiecewisePoly {
    pub fn indicator(a: f64, b: f64) -> Self {
        assert!(a < b, "empty indicator [{a}, {b}]");
        Self { pieces: vec![Piece { x0: a, x1: b, coef: vec![1.0] }] }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.pieces[0].x0, self.pieces[self.pieces.len() - 1].x1)
    }

    pub fn degree(&self) -> usize {
        self.pieces.iter().map(|p| p.coef.len() - 1).max().unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.pieces
            .iter()
            .find(|p| p.x0 <= x && x < p.x1)
            .map_or(0.0, |p| horner(&p.coef, x - p.x0))
    }

    pub fn integral(&self) -> f64 {
        self.pieces.iter().map(|p| horner(&antiderivative(&p.coef), p.x1 - p.x0)).sum()
    }

    /// `int p(x)^2 dx`, exact.
    pub fn l2_norm_sq(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| {
                let len = p.x1 - p.x0;
                let mut s = 0.0;
                for (j, cj) in p.coef.iter().enumerate() {
                    for (k, ck) in p.coef.iter().enumerate() {
                        let e = (j + k + 1) as i32;
                        s += cj * ck * len.powi(e) / e as f64;
                    }
                }
                s
            })
            .sum()
    }

    /// `(f * chi_[c, d])(x) = F(x - c) - F(x - d)` with `F` the antiderivative.
    pub fn convolve_box(&self, c: f64, d: f64) -> Self {
        assert!(c < d, "empty box [{c}, {d}]");
        let anti: Vec<Vec<f64>> = self.pieces.iter().map(|p| antiderivative(&p.coef)).collect();
        let mut offsets = Vec::with_capacity(self.pieces.len() + 1);
        let mut acc = 0.0;
        for (p, a) in self.pieces.iter().zip(&anti) {
            offsets.push(acc);
            acc += horner(a, p.x1 - p.x0);
        }
        let total = acc;
        let mut knots: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| [p.x0 + c, p.x0 + d])
            .chain([self.support().1 + c, self.support().1 + d])
            .collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();

        // F shifted by `shift`, as a polynomial in t = x - y0 on [y0, y1)
        let shifted = |y0: f64, y1: f64, shift: f64| -> Vec<f64> {
            let mid = 0.5 * (y0 + y1) - shift;
            let (lo, hi) = self.support();
            if mid < lo {
                return vec![0.0];
            }
            if mid >= hi {
                return vec![total];
            }
            let i = self.pieces.iter().position(|p| mid < p.x1).expect("inside support");
            let mut q = taylor_shift(&anti[i], y0 - shift - self.pieces[i].x0);
            q[0] += offsets[i];
            q
        };
        let pieces = knots
            .windows(2)
            .map(|w| {
                let a = shifted(w[0], w[1], c);
                let b = shifted(w[0], w[1], d);
                let n = a.len().max(b.len());
                let coef = (0..n)
                    .map(|k| a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0))
                    .collect();
                Piece { x0: w[0], x1: w[1], coef }
            })
            .collect();
        Self { pieces }
    }
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

fn antiderivative(c: &[f64]) -> Vec<f64> {
    std::iter::once(0.0).chain(c.iter().enumerate().map(|(k, a)| a / (k + 1) as f64)).collect()
}

/// Coefficients of `q(h + t)` in powers of `t`.
fn taylor_shift(q: &[f64], h: f64) -> Vec<f64> {
    let n = q.len();
    let mut out = vec![0.0; n];
    for (j, &qj) in q.iter().enumerate() {
        let mut binom = 1.0;
        for k in 0..=j {
            // C(j, k) h^(j - k)
            out[k] += qj * binom * h.powi((j - k) as i32);
            binom = binom * (j - k) as f64 / (k + 1) as f64;
        }
    }
    out
}

/// `|| chi_[-w_1, w_1] * ... * chi_[-w_n, w_n] ||_{L^2(R)}`, exact.
///
/// Translation invariance lets every box sit at the origin, which keeps the
/// arithmetic well conditioned for tiny widths far from zero.
pub fn box_convolution_l2(halfwidths: &[f64]) -> Result<f64> {
    let (first, rest) = halfwidths.split_first().ok_or(Error::TooFewPoints { needed: 1, got: 0 })?;
    if halfwidths.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidParameter("box halfwidths must be positive".into()));
    }
    let f = rest
        .iter()
        .fold(PiecewisePoly::indicator(-first, *first), |f, w| f.convolve_box(-w, *w));
    Ok(f.l2_norm_sq().sqrt())
}

/// `|| chi_{R_1} * ... * chi_{R_n} ||_{L^2(R^2)}` for axis-aligned rectangles of any size.
pub fn box_convolution_norm_2d(rects: &[FreqRect]) -> Result<f64> {
    for r in rects {
        r.validate()?;
    }
    let xs: Vec<f64> = rects.iter().map(|r| r.xi_halfwidth).collect();
    let ts: Vec<f64> = rects.iter().map(|r| r.tau_halfwidth).collect();
    Ok(box_convolution_l2(&xs)? * box_convolution_l2(&ts)?)
}

/// Convolution norm of `n` congruent rectangles; behaves like `|R|^{n - 1/2}`.
pub fn rect_convolution_norm(rects: &[FreqRect]) -> Result<f64> {
    let first = rects.first().ok_or(Error::TooFewPoints { needed: 1, got: 0 })?;
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    if rects
        .iter()
        .any(|r| !same(r.xi_halfwidth, first.xi_halfwidth) || !same(r.tau_halfwidth, first.tau_halfwidth))
    {
        return Err(Error::MismatchedDimensions);
    }
    box_convolution_norm_2d(rects)
}

/// Lower bound on `|| chi_{S_1} * ... * chi_{S_n} ||_{L^2}`: exact for rectangles,
/// otherwise the norm of the inscribed rectangles.
pub fn slab_convolution_lower(sets: &[Slab]) -> Result<f64> {
    let inner: Option<Vec<FreqRect>> = sets.iter().map(Slab::inner_rect).collect();
    match inner {
        Some(r) => box_convolution_norm_2d(&r),
        None => Ok(0.0),
    }
}

/// Upper bound through bounding boxes.
pub fn slab_convolution_upper(sets: &[Slab]) -> Result<f64> {
    let boxes: Vec<FreqRect> = sets.iter().map(Slab::bounding_box).collect();
    box_convolution_norm_2d(&boxes)
}

/// Outcome of the convolution lower-bound lemma on concrete sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvBoundCheck {
    /// `|| chi_A * chi_B (* chi_C) ||_{L^2}` (a certified lower bound when slabs are curved).
    pub measured: f64,
    /// `|B| (|C|) |R|^{1/2}`
    pub bound: f64,
    pub ratio: f64,
    pub exact: bool,
}

impl ConvBoundCheck {
    pub fn passes(&self, threshold: f64) -> bool {
        self.ratio >= threshold
    }
}

/// Verify `R - B (- C) ⊂ A` and measure the implied constant of the lower bound.
pub fn conv_lower_bound_check(a: &Slab, others: &[Slab], r: &Slab) -> Result<ConvBoundCheck> {
    if others.is_empty() || others.len() > 2 {
        return Err(Error::InvalidParameter("need one or two sets besides A".into()));
    }
    let mut inputs: Vec<(f64, &Slab)> = vec![(1.0, r)];
    inputs.extend(others.iter().map(|s| (-1.0, s)));
    verify_containment(&inputs, a, "R - B - C in A")?;
    let mut all = vec![*a];
    all.extend_from_slice(others);
    let exact = all.iter().all(Slab::is_rect);
    let measured = slab_convolution_lower(&all)?;
    let bound = others.iter().map(Slab::area).product::<f64>() * r.area().sqrt();
    Ok(ConvBoundCheck { measured, bound, ratio: measured / bound, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit(xc: f64, tc: f64) -> FreqRect {
        FreqRect::new(xc, tc, 0.5, 0.5).unwrap()
    }

    #[test]
    fn tent_function() {
        let f = PiecewisePoly::indicator(0.0, 1.0).convolve_box(0.0, 1.0);
        assert!((f.eval(0.5) - 0.5).abs() < 1e-15);
        assert!((f.eval(1.0) - 1.0).abs() < 1e-15);
        assert!((f.eval(1.5) - 0.5).abs() < 1e-15);
        assert_eq!(f.eval(2.5), 0.0);
        assert!((f.l2_norm_sq() - 2.0 / 3.0).abs() < 1e-15);
        assert!((f.integral() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quadratic_spline_oracle() {
        // three unit boxes: B-spline with int B^2 = 11/20
        let f = PiecewisePoly::indicator(0.0, 1.0).convolve_box(0.0, 1.0).convolve_box(0.0, 1.0);
        assert_eq!(f.degree(), 2);
        assert!((f.l2_norm_sq() - 11.0 / 20.0).abs() < 1e-14);
        assert!((f.eval(1.5) - 0.75).abs() < 1e-14);
    }

    #[test]
    fn unequal_boxes() {
        // chi_[0,1] * chi_[0,2]: trapezoid, int f^2 = 2 * int_0^1 t^2 + 1 = 5/3
        let f = PiecewisePoly::indicator(0.0, 1.0).convolve_box(0.0, 2.0);
        assert!((f.l2_norm_sq() - 5.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn lemma_rectangles() {
        let one = rect_convolution_norm(&[unit(0.0, 0.0)]).unwrap();
        assert!((one - 1.0).abs() < 1e-15);
        let two = rect_convolution_norm(&[unit(0.0, 0.0), unit(3.0, -1.0)]).unwrap();
        assert!((two - 2.0 / 3.0).abs() < 1e-15);
        let r = FreqRect::new(1.0, 1.0, 0.5, 0.25).unwrap();
        assert_eq!(rect_convolution_norm(&[unit(0.0, 0.0), r]), Err(Error::MismatchedDimensions));
    }

    #[test]
    fn scale_covariance() {
        let base = [unit(0.0, 0.0), unit(1.0, 2.0), unit(-4.0, 7.0)];
        let reference = rect_convolution_norm(&base).unwrap();
        for (nx, mt) in [(0.25, 4.0), (8.0, 0.125), (1e-6, 3e5)] {
            let scaled: Vec<FreqRect> = base.iter().map(|r| r.scaled(nx, mt)).collect();
            let v = rect_convolution_norm(&scaled).unwrap() / (nx * mt).powf(2.5);
            assert!((v - reference).abs() < 1e-10 * reference, "{v} vs {reference}");
        }
    }

    #[test]
    fn lower_bound_lemma_on_squares() {
        let a = Slab::from(FreqRect::new(0.0, 0.0, 1.0, 1.0).unwrap());
        let b = Slab::from(unit(0.0, 0.0));
        let rep = conv_lower_bound_check(&a, &[b], &b).unwrap();
        assert!(rep.exact && rep.ratio >= 1.0);
        let c = Slab::from(FreqRect::new(0.0, 0.0, 0.5, 0.5).unwrap());
        let big = Slab::from(FreqRect::new(0.0, 0.0, 1.5, 1.5).unwrap());
        let rep3 = conv_lower_bound_check(&big, &[c, c], &c).unwrap();
        assert!(rep3.ratio >= 1.0);
        let small = Slab::from(FreqRect::new(0.0, 0.0, 0.6, 0.6).unwrap());
        assert!(matches!(conv_lower_bound_check(&small, &[b], &b), Err(Error::ContainmentViolated(_))));
    }

    #[test]
    fn lower_bound_scale_invariant() {
        let mk = |l: f64| {
            let a = Slab::from(FreqRect::new(0.0, 0.0, l, 1.2 * l).unwrap());
            let b = Slab::from(FreqRect::new(0.1 * l, 0.0, 0.3 * l, 0.5 * l).unwrap());
            let r = Slab::from(FreqRect::new(0.2 * l, 0.1 * l, 0.4 * l, 0.6 * l).unwrap());
            conv_lower_bound_check(&a, &[b], &r).unwrap().ratio
        };
        let base = mk(1.0);
        for l in [0.25, 4.0] {
            assert!((mk(l) - base).abs() < 1e-10 * base);
        }
    }

    proptest! {
        #[test]
        fn random_admissible_triples(
            wb in 0.05f64..1.0, hb in 0.05f64..1.0, wc in 0.05f64..1.0, hc in 0.05f64..1.0,
            wr in 0.05f64..1.0, hr in 0.05f64..1.0, xb in -2.0f64..2.0, xr in -2.0f64..2.0,
        ) {
            let b = Slab::from(FreqRect::new(xb, 0.3, wb, hb).unwrap());
            let c = Slab::from(FreqRect::new(-0.5, xb, wc, hc).unwrap());
            let r = Slab::from(FreqRect::new(xr, 1.0, wr, hr).unwrap());
            // smallest A that contains R - B - C
            let a = Slab::from(FreqRect::new(xr - xb + 0.5, 0.7 - xb, wr + wb + wc, hr + hb + hc).unwrap());
            let rep = conv_lower_bound_check(&a, &[b, c], &r).unwrap();
            prop_assert!(rep.ratio >= 1.0 - 1e-12);
        }

        #[test]
        fn mass_is_product_of_widths(ws in proptest::collection::vec(0.01f64..3.0, 1..5)) {
            let f = ws[1..].iter().fold(PiecewisePoly::indicator(-ws[0], ws[0]), |f, w| f.convolve_box(-w, *w));
            let mass: f64 = ws.iter().map(|w| 2.0 * w).product();
            prop_assert!((f.integral() - mass).abs() < 1e-11 * mass);
        }
    }
}
