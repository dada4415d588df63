//! The truncated loop space `E_m`.
//!
//! A loop is `z(t) = Σ_{|k|≤m} exp(kωtJ) a_k` with `ω = 2π/T` and
//! `a_k ∈ R^{2n}`. The `E` inner product is `T a₀·b₀ + T Σ |k| a_k·b_k`, and the
//! operator `A` is given by `⟨Az, ζ⟩ = 2π Σ k a_k·b_k`, so that
//! `Az^± = ±(2π/T) z^±` on `E^±`.
//!
//! In each conjugate plane `(p_i, q_i)` the structure `J` acts as
//! multiplication by `i` on `p_i + i q_i`, which turns a loop into `n` complex
//! Fourier series. [`grid`] uses this to move between coefficients and time
//! samples with FFTs.

pub mod grid;
mod io;
mod scaling;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::apply_j;

pub use grid::{lp_norm, Grid};
pub use scaling::{scale_loop, scale_point, ScalingProfile};

/// Which part of the splitting `E = E⁺ ⊕ E⁻ ⊕ E⁰` to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    Plus,
    Minus,
    Zero,
}

/// A loop in `E_m`, stored densely as `a_{−m}, …, a_m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierLoop {
    n: usize,
    m: usize,
    period: f64,
    coeffs: Vec<f64>,
}

impl FourierLoop {
    pub fn zeros(n: usize, m: usize, period: f64) -> Self {
        assert!(n >= 1 && period > 0.0, "need n ≥ 1 and a positive period");
        Self {
            n,
            m,
            period,
            coeffs: vec![0.0; 2 * n * (2 * m + 1)],
        }
    }

    /// `coeffs` lists `a_{−m}, …, a_m` back to back.
    pub fn from_coeffs(n: usize, m: usize, period: f64, coeffs: Vec<f64>) -> Result<Self> {
        if n == 0 || !(period > 0.0) {
            return Err(Error::InvalidInput(format!(
                "need n ≥ 1 and a positive period, got n = {n}, period = {period}"
            )));
        }
        if coeffs.len() != 2 * n * (2 * m + 1) {
            return Err(Error::Dimension(format!(
                "{} coefficients supplied, E_m with n = {n}, m = {m} needs {}",
                coeffs.len(),
                2 * n * (2 * m + 1)
            )));
        }
        Ok(Self {
            n,
            m,
            period,
            coeffs,
        })
    }

    /// A loop with the listed modes set and all others zero.
    pub fn from_modes(n: usize, m: usize, period: f64, modes: &[(i64, Vec<f64>)]) -> Result<Self> {
        let mut z = Self::zeros(n, m, period);
        for (k, a) in modes {
            if k.unsigned_abs() as usize > m || a.len() != 2 * n {
                return Err(Error::Dimension(format!(
                    "mode {k} with {} entries does not fit E_m (n = {n}, m = {m})",
                    a.len()
                )));
            }
            z.coeff_mut(*k).copy_from_slice(a);
        }
        Ok(z)
    }

    /// The constant loop `a₀`.
    pub fn constant(a0: &[f64], m: usize, period: f64) -> Result<Self> {
        Self::from_modes(a0.len() / 2, m, period, &[(0, a0.to_vec())])
    }

    pub fn half_dim(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn omega(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.period
    }

    /// `dim E_m = 2n(2m+1)`.
    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn offset(&self, k: i64) -> usize {
        assert!(k.unsigned_abs() as usize <= self.m, "mode {k} outside |k| ≤ {}", self.m);
        (k + self.m as i64) as usize * 2 * self.n
    }

    pub fn coeff(&self, k: i64) -> &[f64] {
        let o = self.offset(k);
        &self.coeffs[o..o + 2 * self.n]
    }

    pub fn coeff_mut(&mut self, k: i64) -> &mut [f64] {
        let o = self.offset(k);
        let w = 2 * self.n;
        &mut self.coeffs[o..o + w]
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, &[f64])> {
        let m = self.m as i64;
        self.coeffs
            .chunks(2 * self.n)
            .enumerate()
            .map(move |(j, a)| (j as i64 - m, a))
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.m != other.m || !same_period(self.period, other.period) {
            return Err(Error::Dimension(format!(
                "loops live in different spaces: (n, m, T) = ({}, {}, {}) vs ({}, {}, {})",
                self.n, self.m, self.period, other.n, other.m, other.period
            )));
        }
        Ok(())
    }

    /// Gram weight `T·max(|k|, 1)` of mode `k`.
    pub fn weight(&self, k: i64) -> f64 {
        self.period * k.unsigned_abs().max(1) as f64
    }

    /// `T a₀·b₀ + T Σ |k| a_k·b_k`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same_space(other)?;
        Ok(self
            .modes()
            .zip(other.modes())
            .map(|((k, a), (_, b))| self.weight(k) * dot(a, b))
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).expect("same space").sqrt()
    }

    /// `∫₀ᵀ z·ζ dt = T Σ a_k·b_k`.
    pub fn l2_inner(&self, other: &Self) -> Result<f64> {
        self.check_same_space(other)?;
        Ok(self.period * dot(&self.coeffs, &other.coeffs))
    }

    /// Coordinates `x_k = sqrt(w_k) a_k` in which the `E` inner product is
    /// the Euclidean one.
    pub fn to_coords(&self) -> DVector<f64> {
        let w = 2 * self.n;
        DVector::from_iterator(
            self.dim(),
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, a)| a * self.weight((i / w) as i64 - self.m as i64).sqrt()),
        )
    }

    pub fn from_coords(n: usize, m: usize, period: f64, x: &DVector<f64>) -> Result<Self> {
        let mut z = Self::from_coeffs(n, m, period, x.as_slice().to_vec())?;
        let w = 2 * n;
        for i in 0..z.coeffs.len() {
            let k = (i / w) as i64 - m as i64;
            z.coeffs[i] /= z.weight(k).sqrt();
        }
        Ok(z)
    }

    /// Keeps the modes of one part of `E⁺ ⊕ E⁻ ⊕ E⁰`.
    pub fn project(&self, part: Part) -> Self {
        let mut out = self.clone();
        let m = self.m as i64;
        let w = 2 * self.n;
        for (j, chunk) in out.coeffs.chunks_mut(w).enumerate() {
            let k = j as i64 - m;
            let keep = match part {
                Part::Plus => k > 0,
                Part::Minus => k < 0,
                Part::Zero => k == 0,
            };
            if !keep {
                chunk.fill(0.0);
            }
        }
        out
    }

    /// Value at `t` via `exp(θJ) = cos θ I + sin θ J`.
    pub fn eval(&self, t: f64) -> DVector<f64> {
        let mut z = DVector::zeros(2 * self.n);
        let omega = self.omega();
        for (k, a) in self.modes() {
            if a.iter().all(|&x| x == 0.0) {
                continue;
            }
            let theta = k as f64 * omega * t;
            let (s, c) = theta.sin_cos();
            let ja = apply_j(a);
            for i in 0..2 * self.n {
                z[i] += c * a[i] + s * ja[i];
            }
        }
        z
    }

    pub fn evaluate(&self, times: &[f64]) -> Vec<DVector<f64>> {
        times.iter().map(|&t| self.eval(t)).collect()
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|x| *x *= c);
        out
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, other: &Self, c: f64) -> Result<Self> {
        self.check_same_space(other)?;
        let mut out = self.clone();
        for (x, y) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *x += c * y;
        }
        Ok(out)
    }

    /// The same loop in `E_{m'}`, dropping or zero-padding modes.
    pub fn with_truncation(&self, m_new: usize) -> Self {
        let mut out = Self::zeros(self.n, m_new, self.period);
        let keep = self.m.min(m_new) as i64;
        for k in -keep..=keep {
            out.coeff_mut(k).copy_from_slice(self.coeff(k));
        }
        out
    }

    /// The time shift `t ↦ z(t + s)`, exact on coefficients:
    /// `a_k ↦ exp(kωsJ) a_k`.
    pub fn shifted(&self, s: f64) -> Self {
        let mut out = self.clone();
        let omega = self.omega();
        let w = 2 * self.n;
        let m = self.m as i64;
        for (j, chunk) in out.coeffs.chunks_mut(w).enumerate() {
            let k = j as i64 - m;
            let (sn, cs) = (k as f64 * omega * s).sin_cos();
            let ja = apply_j(chunk);
            for i in 0..w {
                chunk[i] = cs * chunk[i] + sn * ja[i];
            }
        }
        out
    }

    /// The same function viewed as `pT`-periodic: mode `k` moves to `pk`.
    pub fn iterate(&self, p: usize) -> Self {
        assert!(p >= 1, "iteration count must be positive");
        let mut out = Self::zeros(self.n, self.m * p, self.period * p as f64);
        for (k, a) in self.modes() {
            out.coeff_mut(k * p as i64).copy_from_slice(a);
        }
        out
    }

    /// The inverse of [`iterate`](Self::iterate): the loop viewed as
    /// `T/p`-periodic, keeping the modes `pk` as modes `k`. Other modes are
    /// dropped.
    pub fn contract(&self, p: usize) -> Self {
        assert!(p >= 1, "contraction count must be positive");
        let m_new = self.m / p;
        let mut out = Self::zeros(self.n, m_new, self.period / p as f64);
        for k in -(m_new as i64)..=m_new as i64 {
            out.coeff_mut(k).copy_from_slice(self.coeff(k * p as i64));
        }
        out
    }

    /// Whether all coefficients are finite.
    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|x| x.is_finite())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Periods equal up to rounding, as produced by iterating and contracting.
pub fn same_period(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// `⟨Az, ζ⟩ = 2π Σ k a_k·b_k`.
pub fn a_form(z: &FourierLoop, w: &FourierLoop) -> Result<f64> {
    z.check_same_space(w)?;
    Ok(2.0
        * std::f64::consts::PI
        * z.modes()
            .zip(w.modes())
            .map(|((k, a), (_, b))| k as f64 * dot(a, b))
            .sum::<f64>())
}
