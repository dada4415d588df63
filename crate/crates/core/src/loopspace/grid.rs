//! Uniform time grids, FFT synthesis and analysis, and trapezoidal quadrature.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Complex, DVector};
use rustfft::{Fft, FftPlanner};

use super::FourierLoop;

/// The grid `t_j = jT/N`, `j = 0..N`, with cached FFT plans.
#[derive(Clone)]
pub struct Grid {
    n_t: usize,
    period: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n_t", &self.n_t)
            .field("period", &self.period)
            .finish()
    }
}

impl Grid {
    pub fn new(n_t: usize, period: f64) -> Self {
        assert!(n_t >= 1 && period > 0.0, "grid needs points and a positive period");
        let mut planner = FftPlanner::new();
        Self {
            n_t,
            period,
            fwd: planner.plan_fft_forward(n_t),
            inv: planner.plan_fft_inverse(n_t),
        }
    }

    /// The default grid for truncation `m`: `N = max(8m, 256)` points.
    pub fn for_truncation(m: usize, period: f64) -> Self {
        Self::new((8 * m).max(256), period)
    }

    pub fn len(&self) -> usize {
        self.n_t
    }

    pub fn is_empty(&self) -> bool {
        self.n_t == 0
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn time(&self, j: usize) -> f64 {
        self.period * j as f64 / self.n_t as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_t).map(|j| self.time(j)).collect()
    }

    /// Trapezoidal weight `T/N`.
    pub fn weight(&self) -> f64 {
        self.period / self.n_t as f64
    }

    /// `∫₀ᵀ g dt` from grid values.
    pub fn integrate(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        self.weight() * values.into_iter().sum::<f64>()
    }

    /// `z(t_j)` for every grid point.
    pub fn synthesize(&self, z: &FourierLoop) -> Vec<DVector<f64>> {
        let n = z.half_dim();
        let m = z.m() as i64;
        assert!(
            self.n_t >= 2 * z.m() + 1,
            "grid of {} points cannot resolve m = {}",
            self.n_t,
            m
        );
        let mut out = vec![DVector::zeros(2 * n); self.n_t];
        let mut buf = vec![Complex::new(0.0, 0.0); self.n_t];
        for i in 0..n {
            buf.fill(Complex::new(0.0, 0.0));
            for k in -m..=m {
                let a = z.coeff(k);
                buf[k.rem_euclid(self.n_t as i64) as usize] = Complex::new(a[i], a[n + i]);
            }
            self.inv.process(&mut buf);
            for (v, c) in out.iter_mut().zip(&buf) {
                v[i] = c.re;
                v[n + i] = c.im;
            }
        }
        out
    }

    /// The loop in `E_m` whose coefficients are `a_k = (1/N) Σ_j exp(−kθ_jJ) z_j`,
    /// the discrete `L²` projection of the samples.
    pub fn analyze(&self, samples: &[DVector<f64>], m: usize) -> FourierLoop {
        assert_eq!(samples.len(), self.n_t, "sample count differs from grid size");
        assert!(self.n_t >= 2 * m + 1, "grid too coarse for m = {m}");
        let n = samples[0].len() / 2;
        let mut z = FourierLoop::zeros(n, m, self.period);
        let mut buf = vec![Complex::new(0.0, 0.0); self.n_t];
        let scale = 1.0 / self.n_t as f64;
        let mi = m as i64;
        for i in 0..n {
            for (b, v) in buf.iter_mut().zip(samples) {
                *b = Complex::new(v[i], v[n + i]);
            }
            self.fwd.process(&mut buf);
            for k in -mi..=mi {
                let c = buf[k.rem_euclid(self.n_t as i64) as usize] * scale;
                let a = z.coeff_mut(k);
                a[i] = c.re;
                a[n + i] = c.im;
            }
        }
        z
    }
}

/// `(∫₀ᵀ |z|^s dt)^{1/s}` by the trapezoidal rule on `grid`.
pub fn lp_norm(z: &FourierLoop, s: f64, grid: &Grid) -> f64 {
    let samples = grid.synthesize(z);
    grid.integrate(samples.iter().map(|v| v.norm().powf(s))).powf(1.0 / s)
}
