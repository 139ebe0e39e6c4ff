// SPDX-License-Identifier: Apache-2.0

use std::num::NonZeroUsize;
use std::sync::LazyLock;

use gauss_quad::GaussLegendre;

static RULE: LazyLock<GaussLegendre> =
    LazyLock::new(|| GaussLegendre::new(NonZeroUsize::new(16).expect("nonzero degree")));

/// Fixed 16-point Gauss-Legendre on one panel.
pub fn gauss_panel(a: f64, b: f64, f: impl FnMut(f64) -> f64) -> f64 {
    if a == b {
        return 0.0;
    }
    RULE.integrate(a, b, f)
}

/// Composite Gauss over the panels delimited by sorted, deduplicated `breaks`.
pub fn gauss_breaks(breaks: &[f64], mut f: impl FnMut(f64) -> f64) -> f64 {
    breaks.windows(2).map(|w| gauss_panel(w[0], w[1], &mut f)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adaptive {
    pub value: f64,
    pub error: f64,
    /// Panels that hit the depth limit without meeting the tolerance.
    pub unresolved: usize,
}

/// Adaptive bisection on Gauss-Legendre panels; a panel is accepted when it
/// agrees with the sum over its two halves.
pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Adaptive {
    fn go(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: usize, out: &mut Adaptive) {
        let m = 0.5 * (a + b);
        let left = gauss_panel(a, m, f);
        let right = gauss_panel(m, b, f);
        let err = (left + right - whole).abs();
        if err <= tol || depth == 0 || m <= a || m >= b {
            out.value += left + right;
            out.error += err;
            if err > tol {
                out.unresolved += 1;
            }
            return;
        }
        go(f, a, m, left, 0.5 * tol, depth - 1, out);
        go(f, m, b, right, 0.5 * tol, depth - 1, out);
    }
    let whole = gauss_panel(a, b, f);
    let mut out = Adaptive { value: 0.0, error: 0.0, unresolved: 0 };
    let tol = abs_tol.max(rel_tol * whole.abs());
    go(f, a, b, whole, tol, 40, &mut out);
    out
}

/// `adaptive` over consecutive panels of `breaks`.
pub fn adaptive_breaks(f: &dyn Fn(f64) -> f64, breaks: &[f64], rel_tol: f64, abs_tol: f64) -> Adaptive {
    let mut total = Adaptive { value: 0.0, error: 0.0, unresolved: 0 };
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let part = adaptive(f, w[0], w[1], rel_tol, abs_tol);
            total.value += part.value;
            total.error += part.error;
            total.unresolved += part.unresolved;
        }
    }
    total
}
