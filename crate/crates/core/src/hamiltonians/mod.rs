//! Hamiltonian models `H(t, z)` with gradients, Hessians and growth data.

mod cutoff;
mod example;
mod hypotheses;
mod quadratic;
mod sampling;

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::DiagonalScaling;

pub use cutoff::{cutoff, smooth_step, CutoffInfo};
pub use example::{example_anisotropic, AnisotropicExample};
pub use hypotheses::{
    check_c5_prime, check_h6, check_h6_prime, check_hypotheses, H6Report, Hypothesis,
    HypothesisReport, QuadraticBoundReport, SamplingSpec, Verdict, VerdictStatus,
};
pub use quadratic::{with_quadratic_term, QuadraticTerm};
pub use sampling::halton;
pub(crate) use sampling::directions as sampling_directions;

/// Pointwise evaluation of `H`, `H′_z` and `H″_zz`.
pub trait Hamiltonian: Send + Sync {
    fn value(&self, t: f64, z: &[f64]) -> f64;
    fn gradient(&self, t: f64, z: &[f64]) -> DVector<f64>;
    fn hessian(&self, t: f64, z: &[f64]) -> DMatrix<f64>;
}

/// Growth constants attached to a model.
///
/// `alpha`/`beta_w` are the weights of `V₁`, `xi`/`eta_w` those of `V₂`,
/// `phi`/`psi` those of `V₃ = V(φ⁻¹, ψ⁻¹)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub beta: f64,
    pub c1: f64,
    pub c2: f64,
    pub alpha: Vec<f64>,
    pub beta_w: Vec<f64>,
    pub xi: Option<Vec<f64>>,
    pub eta_w: Option<Vec<f64>>,
    pub sigma: Vec<f64>,
    pub tau_exp: Vec<f64>,
    pub lambda: f64,
    pub phi: Option<Vec<f64>>,
    pub psi: Option<Vec<f64>>,
    pub theta: Option<f64>,
    pub r0: Option<f64>,
    pub b1: Option<f64>,
    pub b2: Option<f64>,
}

impl GrowthProfile {
    /// The open interval `Λ = (max_i max(σ_i/τ_i, τ_i/σ_i), 1 + β)`.
    pub fn lambda_range(&self) -> (f64, f64) {
        let lo = self
            .sigma
            .iter()
            .zip(&self.tau_exp)
            .map(|(s, t)| (s / t).max(t / s))
            .fold(0.0, f64::max);
        (lo, 1.0 + self.beta)
    }

    /// Checks the structural invariants: `β > 1`, positive constants,
    /// `α_i + β_i = 1`, `ξ_i + η_i = 1`, `1/φ_i + 1/ψ_i = 1` and `λ ∈ Λ`.
    pub fn validate(&self) -> Result<()> {
        let n = self.sigma.len();
        let bad = |field: &str, message: String| Error::Config {
            field: field.into(),
            message,
        };
        if !(self.beta > 1.0) {
            return Err(bad("beta", format!("β = {} must exceed 1", self.beta)));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0) {
            return Err(bad("c1", "c₁ and c₂ must be positive".into()));
        }
        for (name, v) in [
            ("alpha", &self.alpha),
            ("beta_w", &self.beta_w),
            ("tau_exp", &self.tau_exp),
        ] {
            if v.len() != n {
                return Err(bad(name, format!("length {} differs from n = {n}", v.len())));
            }
        }
        DiagonalScaling::weights(self.alpha.clone(), self.beta_w.clone())
            .map_err(|e| bad("alpha", e.to_string()))?;
        match (&self.xi, &self.eta_w) {
            (Some(x), Some(e)) => {
                DiagonalScaling::weights(x.clone(), e.clone()).map_err(|e| bad("xi", e.to_string()))?;
            }
            (None, None) => {}
            _ => return Err(bad("xi", "ξ and η must be given together".into())),
        }
        if let (Some(phi), Some(psi)) = (&self.phi, &self.psi) {
            for (i, (f, p)) in phi.iter().zip(psi).enumerate() {
                if (1.0 / f + 1.0 / p - 1.0).abs() > 1e-12 {
                    return Err(bad("phi", format!("1/φ + 1/ψ ≠ 1 at index {i}")));
                }
            }
        }
        if let Some(theta) = self.theta {
            if !(theta > 0.0 && theta < 1.0) {
                return Err(bad("theta", format!("θ = {theta} must lie in (0, 1)")));
            }
        }
        let (lo, hi) = self.lambda_range();
        if !(self.lambda > lo && self.lambda < hi) {
            return Err(bad(
                "lambda",
                format!("λ = {} outside Λ = ({lo}, {hi})", self.lambda),
            ));
        }
        Ok(())
    }

    pub fn v1(&self) -> DiagonalScaling {
        DiagonalScaling::weights(self.alpha.clone(), self.beta_w.clone()).expect("validated weights")
    }

    pub fn v2(&self) -> Option<DiagonalScaling> {
        Some(DiagonalScaling::weights(self.xi.clone()?, self.eta_w.clone()?).expect("validated weights"))
    }

    pub fn v3(&self) -> Option<DiagonalScaling> {
        let a = self.phi.as_ref()?.iter().map(|x| 1.0 / x).collect();
        let b = self.psi.as_ref()?.iter().map(|x| 1.0 / x).collect();
        DiagonalScaling::new(a, b).ok()
    }

    /// `w(z) = Σ |p_i|^{1+σ_i/τ_i} + |q_i|^{1+τ_i/σ_i}`.
    pub fn w(&self, z: &[f64]) -> f64 {
        let n = self.sigma.len();
        (0..n)
            .map(|i| {
                let r = self.sigma[i] / self.tau_exp[i];
                z[i].abs().powf(1.0 + r) + z[n + i].abs().powf(1.0 + 1.0 / r)
            })
            .sum()
    }

    /// `γ = max_i{α_i/β_i, β_i/α_i, ξ_i/η_i, η_i/ξ_i, σ_i/τ_i, τ_i/σ_i, β − 1}`.
    pub fn gamma(&self) -> f64 {
        let ratio = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x / y).max(y / x))
                .fold(0.0, f64::max)
        };
        let mut g = ratio(&self.alpha, &self.beta_w)
            .max(ratio(&self.sigma, &self.tau_exp))
            .max(self.beta - 1.0);
        if let (Some(x), Some(e)) = (&self.xi, &self.eta_w) {
            g = g.max(ratio(x, e));
        }
        g
    }
}

/// A Hamiltonian together with its dimension, period and growth data.
#[derive(Clone)]
pub struct HamiltonianModel {
    name: String,
    n: usize,
    period: f64,
    autonomous: bool,
    growth: Option<GrowthProfile>,
    cutoff: Option<CutoffInfo>,
    quadratic: Option<QuadraticTerm>,
    inner: Arc<dyn Hamiltonian>,
}

impl fmt::Debug for HamiltonianModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianModel")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("period", &self.period)
            .field("autonomous", &self.autonomous)
            .finish_non_exhaustive()
    }
}

impl HamiltonianModel {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        period: f64,
        autonomous: bool,
        growth: Option<GrowthProfile>,
        inner: Arc<dyn Hamiltonian>,
    ) -> Result<Self> {
        if n == 0 || !(period > 0.0) {
            return Err(Error::InvalidInput(format!(
                "need n ≥ 1 and a positive period, got n = {n}, period = {period}"
            )));
        }
        if let Some(g) = &growth {
            if g.sigma.len() != n {
                return Err(Error::Dimension(format!(
                    "growth profile has n = {}, model has n = {n}",
                    g.sigma.len()
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            n,
            period,
            autonomous,
            growth,
            cutoff: None,
            quadratic: None,
            inner,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn half_dim(&self) -> usize {
        self.n
    }

    /// The period `τ` in `t`. Autonomous models accept any period; this one is
    /// the default used by callers.
    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn autonomous(&self) -> bool {
        self.autonomous
    }

    pub fn growth(&self) -> Option<&GrowthProfile> {
        self.growth.as_ref()
    }

    /// Constants of the cut-off, when this model is some `H_K`.
    pub fn cutoff_info(&self) -> Option<&CutoffInfo> {
        self.cutoff.as_ref()
    }

    /// The quadratic part `B̂`, when this model was built with one.
    pub fn quadratic_term(&self) -> Option<&QuadraticTerm> {
        self.quadratic.as_ref()
    }

    pub fn with_period(mut self, period: f64) -> Result<Self> {
        if !self.autonomous {
            return Err(Error::InvalidInput(
                "the period of a time-dependent model is fixed".into(),
            ));
        }
        self.period = period;
        Ok(self)
    }

    pub fn value(&self, t: f64, z: &[f64]) -> f64 {
        self.inner.value(t, z)
    }

    pub fn gradient(&self, t: f64, z: &[f64]) -> DVector<f64> {
        self.inner.gradient(t, z)
    }

    pub fn hessian(&self, t: f64, z: &[f64]) -> DMatrix<f64> {
        self.inner.hessian(t, z)
    }

    pub(crate) fn inner(&self) -> &Arc<dyn Hamiltonian> {
        &self.inner
    }
}

/// `H ≡ 0`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroHamiltonian {
    n: usize,
}

impl Hamiltonian for ZeroHamiltonian {
    fn value(&self, _t: f64, _z: &[f64]) -> f64 {
        0.0
    }

    fn gradient(&self, _t: f64, _z: &[f64]) -> DVector<f64> {
        DVector::zeros(2 * self.n)
    }

    fn hessian(&self, _t: f64, _z: &[f64]) -> DMatrix<f64> {
        DMatrix::zeros(2 * self.n, 2 * self.n)
    }
}

/// The autonomous model `H ≡ 0`.
pub fn zero_model(n: usize, period: f64) -> Result<HamiltonianModel> {
    HamiltonianModel::new("zero", n, period, true, None, Arc::new(ZeroHamiltonian { n }))
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;

    /// Largest relative error of the analytic gradient and Hessian against
    /// central differences with step `h`.
    pub fn fd_errors(model: &HamiltonianModel, t: f64, z: &[f64], h: f64) -> (f64, f64) {
        let dim = z.len();
        let g = model.gradient(t, z);
        let hs = model.hessian(t, z);
        let mut fd_g = DVector::zeros(dim);
        let mut fd_h = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            let mut zp = z.to_vec();
            let mut zm = z.to_vec();
            zp[i] += h;
            zm[i] -= h;
            fd_g[i] = (model.value(t, &zp) - model.value(t, &zm)) / (2.0 * h);
            let col = (model.gradient(t, &zp) - model.gradient(t, &zm)) / (2.0 * h);
            fd_h.set_column(i, &col);
        }
        let rel = |a: f64, scale: f64| a / scale.max(1e-8);
        (
            rel((&g - &fd_g).norm(), g.norm()),
            rel((&hs - &fd_h).norm(), hs.norm()),
        )
    }
}
