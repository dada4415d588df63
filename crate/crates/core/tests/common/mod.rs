//! Path generators and oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;

use linkorbit::hamiltonians::HamiltonianModel;
use linkorbit::loopspace::FourierLoop;
use linkorbit::symplectic::{standard_j, FnMatrixPath};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_symmetric(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-scale..scale));
    (&a + a.transpose()) * 0.5
}

/// `B(t) = S₀ + Σ_{j≤2} (C_j cos jωt + D_j sin jωt)` with random symmetric
/// coefficients; `S₀` has entries of size `scale`.
pub fn random_smooth_path(rng: &mut ChaCha8Rng, n: usize, period: f64, scale: f64) -> FnMatrixPath {
    let dim = 2 * n;
    let s0 = random_symmetric(rng, dim, scale);
    let terms: Vec<(DMatrix<f64>, DMatrix<f64>)> = (0..2)
        .map(|_| (random_symmetric(rng, dim, 0.5 * scale), random_symmetric(rng, dim, 0.5 * scale)))
        .collect();
    let omega = TAU / period;
    FnMatrixPath::new(n, period, move |t| {
        let mut b = s0.clone();
        for (j, (c, d)) in terms.iter().enumerate() {
            let x = (j + 1) as f64 * omega * t;
            b += c * x.cos() + d * x.sin();
        }
        b
    })
    .unwrap()
}

/// `Sᵀ diag(c(t), c(t)) S` with `S = exp(JK)` a random symplectic matrix and
/// `c_i(t) = r_i + a_i sin(ωt + φ_i)`. Plane `i` rotates by `2π r_i` over a
/// period `2π`, so the nullity is `2·#{i : r_i ∈ ℤ}`.
pub fn rotation_path(rng: &mut ChaCha8Rng, rates: &[f64]) -> FnMatrixPath {
    let n = rates.len();
    let dim = 2 * n;
    let k = random_symmetric(rng, dim, 0.3);
    let s = (standard_j(n) * k).exp();
    let amp: Vec<(f64, f64)> = (0..n).map(|_| (rng.random_range(-0.4..0.4), rng.random_range(0.0..TAU))).collect();
    let rates = rates.to_vec();
    FnMatrixPath::new(n, TAU, move |t| {
        let mut d = DMatrix::zeros(dim, dim);
        for i in 0..n {
            let c = rates[i] + amp[i].0 * (t + amp[i].1).sin();
            d[(i, i)] = c;
            d[(n + i, n + i)] = c;
        }
        s.transpose() * d * &s
    })
    .unwrap()
}

/// `R(t)ᵀR(t) + εI`, positive definite everywhere.
pub fn positive_path(rng: &mut ChaCha8Rng, n: usize) -> FnMatrixPath {
    let dim = 2 * n;
    let r0 = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
    let r1 = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-0.5..0.5));
    let eps = rng.random_range(0.05..0.5);
    FnMatrixPath::new(n, TAU, move |t| {
        let r = &r0 + &r1 * t.cos();
        r.transpose() * r + DMatrix::identity(dim, dim) * eps
    })
    .unwrap()
}

/// Closed-form pair of `B ≡ b·I` at period `T = kτ`: mode `j` contributes
/// `2n` eigenvalues `(2π/T)·sign(j) − b/max(|j|, 1)` (with `sign(0) = 0`), and
/// `i = #negative − n(2m+1)`, `ν = #zero`.
pub fn constant_oracle(b: f64, n: usize, k: usize, tau: f64, m: i64) -> (i64, usize) {
    let period = k as f64 * tau;
    let (mut neg, mut zero) = (0usize, 0usize);
    for j in -m..=m {
        let lam = TAU / period * (j.signum() as f64) - b / (j.unsigned_abs().max(1) as f64);
        if lam.abs() < 1e-12 {
            zero += 2 * n;
        } else if lam < 0.0 {
            neg += 2 * n;
        }
    }
    (neg as i64 - (n as i64) * (2 * m + 1), zero)
}

/// Largest of `‖∇_fd H − ∇H‖/max(‖∇H‖, 1)` and the same for the Hessian.
pub fn model_fd_error(model: &HamiltonianModel, t: f64, z: &[f64], h: f64) -> f64 {
    let dim = z.len();
    let g = model.gradient(t, z);
    let hs = model.hessian(t, z);
    let mut fd_g = DVector::zeros(dim);
    let mut fd_h = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let (mut zp, mut zm) = (z.to_vec(), z.to_vec());
        zp[i] += h;
        zm[i] -= h;
        fd_g[i] = (model.value(t, &zp) - model.value(t, &zm)) / (2.0 * h);
        fd_h.set_column(i, &((model.gradient(t, &zp) - model.gradient(t, &zm)) / (2.0 * h)));
    }
    let eg = (&g - fd_g).norm() / g.norm().max(1.0);
    let eh = (&hs - fd_h).norm() / hs.norm().max(1.0);
    eg.max(eh)
}

/// A loop with Gaussian coefficients decaying like `1/max(|k|,1)`.
pub fn random_loop(rng: &mut ChaCha8Rng, n: usize, m: usize, period: f64, scale: f64) -> FourierLoop {
    let mut z = FourierLoop::zeros(n, m, period);
    for k in -(m as i64)..=(m as i64) {
        let s = scale / (k.unsigned_abs().max(1) as f64);
        for a in z.coeff_mut(k) {
            *a = s * rng.random_range(-1.0..1.0);
        }
    }
    z
}
