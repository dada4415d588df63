//! The cut-off modification `H_K = χ(|z|)H + (1−χ(|z|))C_K|z|^{λ₀+1}`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

use super::sampling::halton_point;
use super::{Hamiltonian, HamiltonianModel};

/// Shell sample size for the `C_K` maximization.
const SHELL_POINTS: u64 = 10_000;

/// The `C^∞` step `S` with `S = 0` on `(−∞, 0]`, `S = 1` on `[1, ∞)` and
/// `S′ > 0` in between, returned with its first two derivatives.
///
/// Inside `(0,1)`, `S(u) = 1/(1+e^{−s})` with `s = 1/(1−u) − 1/u`.
pub fn smooth_step(u: f64) -> (f64, f64, f64) {
    // e^{−1/u} < e^{−1000} is below f64 resolution next to 1.
    if u <= 1e-3 {
        return (0.0, 0.0, 0.0);
    }
    if u >= 1.0 - 1e-3 {
        return (1.0, 0.0, 0.0);
    }
    let v = 1.0 - u;
    let s = 1.0 / v - 1.0 / u;
    let ds = 1.0 / (v * v) + 1.0 / (u * u);
    let dds = 2.0 / (v * v * v) - 2.0 / (u * u * u);
    let e = (-s.abs()).exp();
    let sig = if s >= 0.0 { 1.0 / (1.0 + e) } else { e / (1.0 + e) };
    let d1 = e / ((1.0 + e) * (1.0 + e));
    let d2 = d1 * (1.0 - 2.0 * sig);
    (sig, d1 * ds, d2 * ds * ds + d1 * dds)
}

/// The constants chosen for a cut-off model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutoffInfo {
    pub k: f64,
    pub lambda0: f64,
    pub c_k: f64,
    /// `max H/|z|^{λ₀+1}` over the shell sample.
    pub shell_max: f64,
    /// `c₁ / min_i{α_iλ₀ − β_i, β_iλ₀ − α_i}`.
    pub growth_term: f64,
    pub a1: f64,
}

struct CutoffHamiltonian {
    base: Arc<dyn Hamiltonian>,
    k: f64,
    lambda0: f64,
    c_k: f64,
}

impl CutoffHamiltonian {
    /// `ψ(s) = C_K s^{λ₀+1}` and its derivatives.
    fn psi(&self, s: f64) -> (f64, f64, f64) {
        let l = self.lambda0;
        (
            self.c_k * s.powf(l + 1.0),
            self.c_k * (l + 1.0) * s.powf(l),
            self.c_k * (l + 1.0) * l * s.powf(l - 1.0),
        )
    }

    /// Hessian of a radial function with radial derivatives `d1`, `d2`.
    fn radial_hessian(u: &DVector<f64>, s: f64, d1: f64, d2: f64) -> DMatrix<f64> {
        let uu = u * u.transpose();
        let id = DMatrix::identity(u.len(), u.len());
        &uu * d2 + (id - &uu) * (d1 / s)
    }
}

impl Hamiltonian for CutoffHamiltonian {
    fn value(&self, t: f64, z: &[f64]) -> f64 {
        let s = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        if s <= self.k {
            return self.base.value(t, z);
        }
        let psi = self.psi(s).0;
        if s >= self.k + 1.0 {
            return psi;
        }
        let chi = 1.0 - smooth_step(s - self.k).0;
        chi * self.base.value(t, z) + (1.0 - chi) * psi
    }

    fn gradient(&self, t: f64, z: &[f64]) -> DVector<f64> {
        let zv = DVector::from_column_slice(z);
        let s = zv.norm();
        if s <= self.k {
            return self.base.gradient(t, z);
        }
        let u = &zv / s;
        let (psi, dpsi, _) = self.psi(s);
        if s >= self.k + 1.0 {
            return u * dpsi;
        }
        let (st, dst, _) = smooth_step(s - self.k);
        let (chi, dchi) = (1.0 - st, -dst);
        let h = self.base.value(t, z);
        let g = self.base.gradient(t, z);
        &u * (dchi * (h - psi) + (1.0 - chi) * dpsi) + g * chi
    }

    fn hessian(&self, t: f64, z: &[f64]) -> DMatrix<f64> {
        let zv = DVector::from_column_slice(z);
        let s = zv.norm();
        if s <= self.k {
            return self.base.hessian(t, z);
        }
        let u = &zv / s;
        let (psi, dpsi, ddpsi) = self.psi(s);
        let hess_psi = Self::radial_hessian(&u, s, dpsi, ddpsi);
        if s >= self.k + 1.0 {
            return hess_psi;
        }
        let (st, dst, ddst) = smooth_step(s - self.k);
        let (chi, dchi, ddchi) = (1.0 - st, -dst, -ddst);
        let h = self.base.value(t, z);
        let g = self.base.gradient(t, z);
        let hh = self.base.hessian(t, z);
        let diff = g - &u * dpsi;
        let cross = &u * diff.transpose() * dchi;
        Self::radial_hessian(&u, s, dchi, ddchi) * (h - psi)
            + &cross
            + cross.transpose()
            + hh * chi
            + hess_psi * (1.0 - chi)
    }
}

/// `H_K` for `model`, with `C_K = max{shell max of H/|z|^{λ₀+1}, growth term, a1}`.
///
/// `a1` is the solver's geometric lower bound `A₁`; pass 0 when it is not
/// needed. Requires growth data, `K ≥ 1` and `λ₀ ∈ (γ, 1+β)`.
pub fn cutoff(model: &HamiltonianModel, k: f64, lambda0: f64, a1: f64) -> Result<HamiltonianModel> {
    let growth = model.growth().ok_or_else(|| {
        Error::InvalidInput("the cut-off needs a model with growth data".into())
    })?;
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::InvalidInput(format!("cut-off radius K = {k} must be ≥ 1")));
    }
    let gamma = growth.gamma();
    if !(lambda0 > gamma && lambda0 < 1.0 + growth.beta) {
        return Err(Error::InvalidInput(format!(
            "λ₀ = {lambda0} is inadmissible: need {gamma} < λ₀ < {}",
            1.0 + growth.beta
        )));
    }
    let dim = 2 * model.half_dim();
    let mut shell_max: f64 = 0.0;
    let mut idx = 1u64;
    let mut taken = 0;
    while taken < SHELL_POINTS {
        let u = halton_point(idx, dim + 2);
        idx += 1;
        let v: Vec<f64> = u[2..].iter().map(|x| 2.0 * x - 1.0).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-3 {
            continue;
        }
        taken += 1;
        let r = k + u[0];
        let z: Vec<f64> = v.iter().map(|x| x * r / norm).collect();
        let t = model.period() * u[1];
        shell_max = shell_max.max(model.value(t, &z) / r.powf(lambda0 + 1.0));
    }
    let denom = growth
        .alpha
        .iter()
        .zip(&growth.beta_w)
        .map(|(a, b)| (a * lambda0 - b).min(b * lambda0 - a))
        .fold(f64::INFINITY, f64::min);
    let growth_term = growth.c1 / denom;
    let c_k = shell_max.max(growth_term).max(a1);
    let info = CutoffInfo {
        k,
        lambda0,
        c_k,
        shell_max,
        growth_term,
        a1,
    };
    let inner = CutoffHamiltonian {
        base: model.inner().clone(),
        k,
        lambda0,
        c_k,
    };
    let mut out = HamiltonianModel::new(
        format!("{}_cutoff", model.name()),
        model.half_dim(),
        model.period(),
        model.autonomous(),
        model.growth().cloned(),
        Arc::new(inner),
    )?;
    out.cutoff = Some(info);
    Ok(out)
}
