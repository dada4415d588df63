//! Fundamental solutions `γ' = J B(t) γ`, `γ(0) = I`, and their iterates.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::path::MatrixFunction;
use super::{project_symplectic, standard_j, symplectic_residual, SymplecticMatrix};

/// Integration settings for [`fundamental_solution`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowOptions {
    pub steps: usize,
    /// Re-project onto `Sp(2n)` after every step.
    pub project: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            steps: 4096,
            project: false,
        }
    }
}

impl FlowOptions {
    pub fn steps(steps: usize) -> Self {
        Self {
            steps,
            ..Self::default()
        }
    }
}

/// A sampled path `γ: [0, τ] → Sp(2n)` with `γ(0) = I`.
#[derive(Clone, Debug)]
pub struct SymplecticPath {
    n: usize,
    period: f64,
    times: Vec<f64>,
    values: Vec<SymplecticMatrix>,
}

impl SymplecticPath {
    /// Validates every sample against `tol`.
    pub fn new(period: f64, samples: Vec<(f64, DMatrix<f64>)>, tol: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("a path needs at least one sample".into()));
        }
        let n = samples[0].1.nrows() / 2;
        let id = DMatrix::<f64>::identity(2 * n, 2 * n);
        if samples[0].0 != 0.0 || samples[0].1 != id {
            return Err(Error::InvalidInput("path must start at t = 0 with γ(0) = I".into()));
        }
        let mut times = Vec::with_capacity(samples.len());
        let mut values = Vec::with_capacity(samples.len());
        for (t, m) in samples {
            times.push(t);
            values.push(SymplecticMatrix::new(m, tol)?);
        }
        Ok(Self {
            n,
            period,
            times,
            values,
        })
    }

    pub fn half_dim(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, &SymplecticMatrix)> {
        self.times.iter().copied().zip(self.values.iter())
    }

    /// The monodromy `γ(τ)`.
    pub fn end(&self) -> &SymplecticMatrix {
        self.values.last().expect("nonempty path")
    }

    /// Largest symplectic residual over all samples.
    pub fn max_residual(&self) -> f64 {
        self.values
            .iter()
            .map(SymplecticMatrix::residual)
            .fold(0.0, f64::max)
    }
}

fn rhs(j: &DMatrix<f64>, b: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    j * (b * y)
}

/// Integrates `γ' = J B(t) γ` with the classical fourth-order Runge–Kutta
/// scheme on a uniform grid of `opts.steps` intervals.
pub fn fundamental_solution<F: MatrixFunction + ?Sized>(
    b: &F,
    opts: FlowOptions,
) -> Result<SymplecticPath> {
    if opts.steps < 2 {
        return Err(Error::InvalidInput(format!(
            "at least 2 steps required, got {}",
            opts.steps
        )));
    }
    let n = b.half_dim();
    let period = b.period();
    let j = standard_j(n);
    let h = period / opts.steps as f64;
    let mut y = DMatrix::<f64>::identity(2 * n, 2 * n);
    let mut times = Vec::with_capacity(opts.steps + 1);
    let mut values = Vec::with_capacity(opts.steps + 1);
    times.push(0.0);
    values.push(SymplecticMatrix::from_trusted(y.clone()));
    let mut b_left = b.eval(0.0);
    for s in 0..opts.steps {
        let t = s as f64 * h;
        let b_mid = b.eval(t + 0.5 * h);
        let b_right = b.eval(t + h);
        let k1 = rhs(&j, &b_left, &y);
        let k2 = rhs(&j, &b_mid, &(&y + 0.5 * h * &k1));
        let k3 = rhs(&j, &b_mid, &(&y + 0.5 * h * &k2));
        let k4 = rhs(&j, &b_right, &(&y + h * &k3));
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if opts.project {
            y = project_symplectic(&y, 1e-14, 8);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::IntegrationDiverged {
                t: t + h,
                reason: "non-finite entries in the fundamental solution".into(),
            });
        }
        times.push(if s + 1 == opts.steps { period } else { t + h });
        values.push(SymplecticMatrix::from_trusted(y.clone()));
        b_left = b_right;
    }
    log::debug!(
        "fundamental solution: steps = {}, final residual = {:.3e}",
        opts.steps,
        symplectic_residual(&y).unwrap_or(f64::NAN)
    );
    Ok(SymplecticPath {
        n,
        period,
        times,
        values,
    })
}

/// The iterated path `γ^k(t) = γ(t − jτ) γ(τ)^j` for `jτ ≤ t ≤ (j+1)τ`.
pub fn iterate_path(gamma: &SymplecticPath, k: usize) -> Result<SymplecticPath> {
    if k == 0 {
        return Err(Error::InvalidInput("iteration count must be positive".into()));
    }
    let tau = gamma.period;
    let end = gamma.end().matrix().clone();
    let mut power = DMatrix::<f64>::identity(2 * gamma.n, 2 * gamma.n);
    let mut times = Vec::with_capacity(k * (gamma.len() - 1) + 1);
    let mut values = Vec::with_capacity(times.capacity());
    times.push(0.0);
    values.push(gamma.values[0].clone());
    for j in 0..k {
        for (t, g) in gamma.times.iter().zip(&gamma.values).skip(1) {
            times.push(t + j as f64 * tau);
            values.push(SymplecticMatrix::from_trusted(g.matrix() * &power));
        }
        power = &end * power;
    }
    Ok(SymplecticPath {
        n: gamma.n,
        period: k as f64 * tau,
        times,
        values,
    })
}
