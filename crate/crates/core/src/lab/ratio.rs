// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::boxconv::{box_convolution_norm_2d, slab_convolution_lower, slab_convolution_upper};
use super::families::{CounterexampleFamily, OutputWeight};
use super::interval::{Cubic, Interval};
use super::sets::{image_bounds, FreqRect, Slab};
use crate::error::{Error, Result};
use crate::spectral::WeightSpec;

/// Weighted-convolution norm against the product of input norms, with a certified bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioReport {
    /// Frozen-weight estimate of the left side.
    pub lhs: f64,
    /// `prod |S_i|^{1/2}`
    pub rhs: f64,
    pub ratio: f64,
    pub lhs_lo: f64,
    pub lhs_hi: f64,
    pub ratio_lo: f64,
    pub ratio_hi: f64,
    /// `max(hi / lhs, lhs / lo) - 1`: how far the frozen value can be off.
    pub frozen_error: f64,
}

fn output_dispersion(out: Option<&OutputWeight>) -> f64 {
    out.map_or(0.0, |o| o.weight.dispersion)
}

fn output_range(out: Option<&OutputWeight>, xi: Interval, sigma: Interval) -> (f64, f64) {
    out.map_or((1.0, 1.0), |o| o.range(xi, sigma))
}

fn check_nonempty(fam: &CounterexampleFamily) -> Result<()> {
    if fam.inputs.is_empty() || fam.inputs.iter().any(|f| !(f.set.area() > 0.0)) {
        return Err(Error::EmptyFamily(format!("{:?} at N = {}", fam.id, fam.n)));
    }
    Ok(())
}

/// Frozen-weight evaluation of `|| W_out (f_1/W_1 * ... * f_n/W_n) ||_{L^2}` with `f_i = chi_{S_i}`.
pub fn estimate_ratio(fam: &CounterexampleFamily) -> Result<RatioReport> {
    check_nonempty(fam)?;
    let sets = fam.sets();
    let out = fam.output.as_ref();
    let c_out = output_dispersion(out);
    let chain: Vec<(f64, &Slab)> = sets.iter().map(|s| (1.0, s)).collect();
    let (sum_xi, sum_sigma, _) = image_bounds(&chain, &Cubic::dispersion(c_out));
    let (out_lo, out_hi) = output_range(out, sum_xi, sum_sigma);

    let ranges: Vec<(f64, f64)> = fam.inputs.iter().map(|f| f.set.weight_range(&f.weight)).collect();
    let inv_min: f64 = ranges.iter().map(|r| 1.0 / r.1).product();
    let inv_max: f64 = ranges.iter().map(|r| 1.0 / r.0).product();
    let rhs: f64 = sets.iter().map(|s| s.area().sqrt()).product();

    let mut lhs_lo = out_lo * inv_min * slab_convolution_lower(&sets)?;
    if let Some(r) = &fam.target {
        // on R the convolution is at least |B| (|C|)
        let (r_lo, _) = output_range(out, r.xi, r.modulation(c_out));
        let inner: f64 = sets[1..].iter().map(Slab::area).product();
        lhs_lo = lhs_lo.max(r_lo * inv_min * inner * r.area().sqrt());
    }
    let lhs_hi = out_hi * inv_max * slab_convolution_upper(&sets)?;

    let straight: Vec<FreqRect> = sets.iter().map(Slab::straightened).collect();
    let frozen_in: f64 = fam.inputs.iter().map(|f| 1.0 / f.set.weight_frozen(&f.weight)).product();
    let frozen_out = out.map_or(1.0, |o| {
        let xc = sum_xi.center();
        let d = if o.abs_xi { xc.abs() } else { 1.0 };
        d * o.weight.eval_at_modulation(xc, sum_sigma.mag())
    });
    let central = frozen_out * frozen_in * box_convolution_norm_2d(&straight)?;
    let lhs = central.clamp(lhs_lo, lhs_hi.max(lhs_lo));
    let frozen_error = (lhs_hi / lhs).max(lhs / lhs_lo) - 1.0;
    Ok(RatioReport {
        lhs,
        rhs,
        ratio: lhs / rhs,
        lhs_lo,
        lhs_hi,
        ratio_lo: lhs_lo / rhs,
        ratio_hi: lhs_hi / rhs,
        frozen_error,
    })
}

pub fn trilinear_ratio(fam: &CounterexampleFamily) -> Result<RatioReport> {
    if fam.inputs.len() != 3 {
        return Err(Error::InvalidParameter(format!("{:?} is not a trilinear family", fam.id)));
    }
    estimate_ratio(fam)
}

/// Bilinear ratio with the two input weights replaced.
pub fn bilinear_ratio(fam: &CounterexampleFamily, left: WeightSpec, right: WeightSpec) -> Result<RatioReport> {
    if fam.inputs.len() != 2 {
        return Err(Error::InvalidParameter(format!("{:?} is not a bilinear family", fam.id)));
    }
    let mut f = fam.clone();
    f.inputs[0].weight = left;
    f.inputs[1].weight = right;
    estimate_ratio(&f)
}

/// Independent estimate of the left side: midpoint samples of every set, pushed through
/// the sum map into a 2D histogram over `(xi, tau - c xi^3)`.
pub fn brute_force_lhs(fam: &CounterexampleFamily, samples: usize, bins: usize) -> Result<f64> {
    check_nonempty(fam)?;
    let out = fam.output.as_ref();
    let c = output_dispersion(out);
    let per_set: Vec<Vec<(f64, f64, f64)>> = fam
        .inputs
        .iter()
        .map(|f| {
            let cell = f.set.area() / (samples * samples) as f64;
            let mut pts = Vec::with_capacity(samples * samples);
            for i in 0..samples {
                for j in 0..samples {
                    let u = (i as f64 + 0.5) / samples as f64;
                    let v = (j as f64 + 0.5) / samples as f64;
                    let (x, t) = f.set.point(u, v);
                    pts.push((x, t, cell / f.weight.eval(x, t)));
                }
            }
            pts
        })
        .collect();

    // enumerate all combinations
    let mut acc: Vec<(f64, f64, f64)> = vec![(0.0, 0.0, 1.0)];
    for pts in &per_set {
        let mut next = Vec::with_capacity(acc.len() * pts.len());
        for &(x, t, m) in &acc {
            for &(px, pt, pm) in pts {
                next.push((x + px, t + pt, m * pm));
            }
        }
        acc = next;
    }
    // centre the coordinates before the cubic shear
    let x0 = acc.iter().map(|p| p.0).sum::<f64>() / acc.len() as f64;
    let t0 = acc.iter().map(|p| p.1).sum::<f64>() / acc.len() as f64 - c * x0.powi(3);
    let shear = |x: f64, t: f64| {
        let d = x - x0;
        t - t0 - c * (3.0 * x0 * x0 * d + 3.0 * x0 * d * d + d * d * d)
    };
    let mut xr = (f64::INFINITY, f64::NEG_INFINITY);
    let mut sr = xr;
    for &(x, t, _) in &acc {
        let s = shear(x, t);
        xr = (xr.0.min(x), xr.1.max(x));
        sr = (sr.0.min(s), sr.1.max(s));
    }
    let pad = |r: (f64, f64)| {
        let w = (r.1 - r.0).max(1e-300);
        (r.0 - 0.5 * w / bins as f64, r.1 + 0.5 * w / bins as f64)
    };
    let (xr, sr) = (pad(xr), pad(sr));
    let (dx, ds) = ((xr.1 - xr.0) / bins as f64, (sr.1 - sr.0) / bins as f64);
    let mut hist = vec![0.0; bins * bins];
    for &(x, t, m) in &acc {
        let i = (((x - xr.0) / dx) as usize).min(bins - 1);
        let j = (((shear(x, t) - sr.0) / ds) as usize).min(bins - 1);
        hist[i * bins + j] += m;
    }
    let area = dx * ds;
    let mut total = 0.0;
    for i in 0..bins {
        for j in 0..bins {
            let mass = hist[i * bins + j];
            if mass == 0.0 {
                continue;
            }
            let x = xr.0 + (i as f64 + 0.5) * dx;
            let d = x - x0;
            let sigma = sr.0 + (j as f64 + 0.5) * ds;
            let tau = sigma + t0 + c * (x0.powi(3) + 3.0 * x0 * x0 * d + 3.0 * x0 * d * d + d * d * d);
            let w = out.map_or(1.0, |o| o.eval(x, tau));
            total += (mass / area * w).powi(2) * area;
        }
    }
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::families::{build_counterexample, FamilyId};
    use crate::params::ModelParams;

    fn params(alpha: f64, s: f64, k: f64) -> ModelParams {
        ModelParams::trilinear_preset(alpha, s, k, 0.1).unwrap()
    }

    #[test]
    fn bracket_is_ordered() {
        for id in FamilyId::ALL {
            for n in [4.0, 64.0, 1024.0] {
                let f = build_counterexample(id, &params(2.0, 1.0, 0.0), n, None).unwrap();
                let rep = estimate_ratio(&f).unwrap();
                assert!(rep.lhs_lo > 0.0 && rep.lhs_lo <= rep.lhs && rep.lhs <= rep.lhs_hi, "{id:?} {n} {rep:?}");
                assert!((rep.ratio - rep.lhs / rep.rhs).abs() <= 1e-14 * rep.ratio);
            }
        }
    }

    #[test]
    fn empty_family_rejected() {
        let mut f = build_counterexample(FamilyId::P61b, &params(2.0, 1.0, 0.0), 8.0, None).unwrap();
        f.inputs.clear();
        assert!(matches!(estimate_ratio(&f), Err(Error::EmptyFamily(_))));
    }

    #[test]
    fn arity_checked() {
        let tri = build_counterexample(FamilyId::P52a, &params(2.0, 2.0, 0.0), 8.0, None).unwrap();
        let bil = build_counterexample(FamilyId::P61a, &params(2.0, 1.0, 0.0), 8.0, None).unwrap();
        assert!(trilinear_ratio(&bil).is_err());
        let w = WeightSpec::new(0.0, 1.0, 0.6);
        assert!(bilinear_ratio(&tri, w, w).is_err());
        let same = bilinear_ratio(&bil, bil.inputs[0].weight, bil.inputs[1].weight).unwrap();
        assert_eq!(same, estimate_ratio(&bil).unwrap());
    }

    #[test]
    fn unit_weights_on_rectangles_are_exact() {
        // with all weights 1 the bracket collapses onto the exact convolution norm
        let mut f = build_counterexample(FamilyId::P62, &params(2.0, -0.5, -0.5), 8.0, Some(-1.0)).unwrap();
        for i in &mut f.inputs {
            i.weight = WeightSpec::new(0.0, 1.0, 0.0);
        }
        let rep = estimate_ratio(&f).unwrap();
        assert!((rep.lhs_hi / rep.lhs_lo - 1.0).abs() < 1e-12);
        let exact = crate::lab::rect_convolution_norm(&f.rects()).unwrap();
        assert!((rep.lhs - exact).abs() < 1e-12 * exact);
        let oracle = brute_force_lhs(&f, 32, 32).unwrap();
        assert!((oracle / exact - 1.0).abs() < 0.03, "{oracle} vs {exact}");
    }

    #[test]
    fn oracle_inside_bracket_trilinear() {
        for id in [FamilyId::P52a, FamilyId::P52b, FamilyId::P53, FamilyId::P54] {
            for n in [4.0, 8.0] {
                let p = if id == FamilyId::P54 { params(2.0, -0.5, -0.5) } else { params(2.0, 2.0, 0.0) };
                let f = build_counterexample(id, &p, n, None).unwrap();
                let rep = trilinear_ratio(&f).unwrap();
                let oracle = brute_force_lhs(&f, 8, 24).unwrap();
                assert!(
                    oracle >= 0.95 * rep.lhs_lo && oracle <= 1.05 * rep.lhs_hi,
                    "{id:?} N={n}: oracle {oracle} bracket [{}, {}] central {}",
                    rep.lhs_lo,
                    rep.lhs_hi,
                    rep.lhs
                );
            }
        }
    }

    #[test]
    fn oracle_inside_bracket_bilinear() {
        for id in [FamilyId::P61a, FamilyId::P61b, FamilyId::P62] {
            for n in [4.0, 8.0, 16.0, 32.0] {
                let p = if id == FamilyId::P62 { params(2.0, -0.5, -0.5) } else { params(2.0, 1.0, 0.0) };
                let f = build_counterexample(id, &p, n, None).unwrap();
                let rep = estimate_ratio(&f).unwrap();
                let oracle = brute_force_lhs(&f, 40, 40).unwrap();
                assert!(
                    oracle >= 0.95 * rep.lhs_lo && oracle <= 1.05 * rep.lhs_hi,
                    "{id:?} N={n}: oracle {oracle} bracket [{}, {}] central {}",
                    rep.lhs_lo,
                    rep.lhs_hi,
                    rep.lhs
                );
            }
        }
    }
}
