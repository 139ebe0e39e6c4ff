// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Periodic grid on `[-L, L)` with `n` collocation points.
///
/// Frequencies are stored in FFT layout: index `j < n/2` carries `pi j / L`,
/// index `j >= n/2` carries `pi (j - n) / L`. The forward transform carries the
/// `1/n` factor, so `f(x_k) = sum_j fhat_j exp(i xi_j (x_k + L))` and
/// `int |f|^2 dx = 2L sum_j |fhat_j|^2`.
#[derive(Clone)]
pub struct FourierGrid {
    n: usize,
    half_length: f64,
    xi: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FourierGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierGrid")
            .field("n", &self.n)
            .field("half_length", &self.half_length)
            .finish()
    }
}

impl PartialEq for FourierGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.half_length == other.half_length
    }
}

/// Signed mode number of FFT index `j` on an `n`-point grid.
#[inline]
pub(crate) fn mode_number(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

impl FourierGrid {
    pub fn new(n: usize, half_length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::GridSize(n));
        }
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "half_length must be positive, got {half_length}"
            )));
        }
        let xi = (0..n)
            .map(|j| PI * mode_number(j, n) as f64 / half_length)
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            half_length,
            xi,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn length(&self) -> f64 {
        2.0 * self.half_length
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn mode(&self, j: usize) -> i64 {
        mode_number(j, self.n)
    }

    /// Index of the unpaired Nyquist mode `-n/2`.
    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    pub fn x(&self) -> Vec<f64> {
        (0..self.n)
            .map(|k| -self.half_length + k as f64 * self.dx())
            .collect()
    }

    /// Sample a function on the grid points.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.x().into_iter().map(f).collect()
    }

    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        let buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward_complex_owned(buf)
    }

    pub fn forward_complex(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.forward_complex_owned(f.to_vec())
    }

    fn forward_complex_owned(&self, mut buf: Vec<Complex64>) -> Vec<Complex64> {
        assert_eq!(buf.len(), self.n, "sample length does not match grid");
        self.fwd.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    pub fn inverse(&self, fhat: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(fhat.len(), self.n, "spectrum length does not match grid");
        let mut buf = fhat.to_vec();
        self.inv.process(&mut buf);
        buf
    }

    /// Inverse transform keeping the real part.
    pub fn inverse_real(&self, fhat: &[Complex64]) -> Vec<f64> {
        self.inverse(fhat).into_iter().map(|c| c.re).collect()
    }

    /// Modes kept by a dealiasing rule retaining the fraction `fraction` of the band:
    /// mode `m` survives when `|m| < fraction * n / 2`.
    pub fn dealias_mask(&self, fraction: f64) -> Vec<bool> {
        let cut = fraction * self.n as f64 / 2.0;
        (0..self.n)
            .map(|j| (self.mode(j).unsigned_abs() as f64) < cut)
            .collect()
    }
}

/// Space-time grid: a [`FourierGrid`] in `x` and `m` samples on `[-T/2, T/2)` in `t`.
///
/// Samples are stored row-major with time as the slow index: `F[k * n + j]`.
#[derive(Clone)]
pub struct SpaceTimeGrid {
    space: FourierGrid,
    m: usize,
    period: f64,
    tau: Vec<f64>,
    fwd_t: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpaceTimeGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpaceTimeGrid")
            .field("space", &self.space)
            .field("m", &self.m)
            .field("period", &self.period)
            .finish()
    }
}

impl SpaceTimeGrid {
    pub fn new(space: FourierGrid, m: usize, period: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!("need m >= 2 time samples, got {m}")));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidParameter(format!("period must be positive, got {period}")));
        }
        let tau = (0..m)
            .map(|j| 2.0 * PI * mode_number(j, m) as f64 / period)
            .collect();
        let fwd_t = FftPlanner::new().plan_fft_forward(m);
        Ok(Self { space, m, period, tau, fwd_t })
    }

    pub fn space(&self) -> &FourierGrid {
        &self.space
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn dt(&self) -> f64 {
        self.period / self.m as f64
    }

    pub fn t(&self) -> Vec<f64> {
        (0..self.m)
            .map(|k| -0.5 * self.period + k as f64 * self.dt())
            .collect()
    }

    /// Sample `f(x, t)` on the grid.
    pub fn sample(&self, f: impl Fn(f64, f64) -> Complex64) -> Vec<Complex64> {
        let xs = self.space.x();
        let mut out = Vec::with_capacity(self.m * xs.len());
        for t in self.t() {
            out.extend(xs.iter().map(|&x| f(x, t)));
        }
        out
    }

    /// 2D forward transform with `1/(n m)` normalization; output layout matches the input.
    pub fn forward(&self, f: &[Complex64]) -> Vec<Complex64> {
        let n = self.space.n();
        assert_eq!(f.len(), n * self.m, "sample length does not match grid");
        let mut rows: Vec<Complex64> = Vec::with_capacity(f.len());
        for row in f.chunks(n) {
            rows.extend(self.space.forward_complex(row));
        }
        let mut col = vec![Complex64::new(0.0, 0.0); self.m];
        let scale = 1.0 / self.m as f64;
        for j in 0..n {
            for k in 0..self.m {
                col[k] = rows[k * n + j];
            }
            self.fwd_t.process(&mut col);
            for k in 0..self.m {
                rows[k * n + j] = col[k] * scale;
            }
        }
        rows
    }
}
