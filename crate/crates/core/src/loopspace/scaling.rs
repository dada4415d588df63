//! The anisotropic scaling `B_ρ(p, q) = (ρ^{τ̃_i−1} p_i, ρ^{σ̃_i−1} q_i)`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::FourierLoop;

/// Growth exponents `σ_i, τ_i` together with `η` and the derived
/// `σ̃_i = ησ_i/(σ_i+τ_i)`, `τ̃_i = ητ_i/(σ_i+τ_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingProfile {
    sigma: Vec<f64>,
    tau_exp: Vec<f64>,
    eta: f64,
    tilde_sigma: Vec<f64>,
    tilde_tau: Vec<f64>,
}

impl ScalingProfile {
    pub fn new(sigma: Vec<f64>, tau_exp: Vec<f64>, eta: f64) -> Result<Self> {
        if sigma.len() != tau_exp.len() || sigma.is_empty() {
            return Err(Error::Dimension(format!(
                "exponent vectors have lengths {} and {}",
                sigma.len(),
                tau_exp.len()
            )));
        }
        if sigma.iter().chain(&tau_exp).any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidInput("exponents must be finite and positive".into()));
        }
        let tilde_sigma: Vec<f64> = sigma
            .iter()
            .zip(&tau_exp)
            .map(|(s, t)| eta * s / (s + t))
            .collect();
        let tilde_tau: Vec<f64> = sigma
            .iter()
            .zip(&tau_exp)
            .map(|(s, t)| eta * t / (s + t))
            .collect();
        // Allow rounding in the minimal choice of η.
        if tilde_sigma.iter().chain(&tilde_tau).any(|&x| x < 1.0 - 1e-12) {
            return Err(Error::InvalidInput(format!(
                "η = {eta} leaves a scaled exponent below 1"
            )));
        }
        Ok(Self {
            sigma,
            tau_exp,
            eta,
            tilde_sigma,
            tilde_tau,
        })
    }

    /// The smallest admissible `η = max_i max(1 + σ_i/τ_i, 1 + τ_i/σ_i)`.
    pub fn minimal(sigma: Vec<f64>, tau_exp: Vec<f64>) -> Result<Self> {
        let eta = sigma
            .iter()
            .zip(&tau_exp)
            .map(|(s, t)| (1.0 + s / t).max(1.0 + t / s))
            .fold(0.0, f64::max);
        Self::new(sigma, tau_exp, eta)
    }

    pub fn half_dim(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn tau_exp(&self) -> &[f64] {
        &self.tau_exp
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn tilde_sigma(&self) -> &[f64] {
        &self.tilde_sigma
    }

    pub fn tilde_tau(&self) -> &[f64] {
        &self.tilde_tau
    }

    /// The factors `(ρ^{τ̃_i−1}, ρ^{σ̃_i−1})` applied to `(p_i, q_i)`.
    pub fn factors(&self, rho: f64) -> Vec<(f64, f64)> {
        self.tilde_tau
            .iter()
            .zip(&self.tilde_sigma)
            .map(|(tt, ts)| (rho.powf(tt - 1.0), rho.powf(ts - 1.0)))
            .collect()
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidInput(format!("ρ = {rho} must be positive")));
    }
    Ok(())
}

/// `B_ρ z` for a point of `R^{2n}`.
pub fn scale_point(z: &[f64], rho: f64, profile: &ScalingProfile) -> Result<DVector<f64>> {
    check_rho(rho)?;
    let n = profile.half_dim();
    if z.len() != 2 * n {
        return Err(Error::Dimension(format!("vector length {} vs 2n = {}", z.len(), 2 * n)));
    }
    let mut out = DVector::from_column_slice(z);
    for (i, (dp, dq)) in profile.factors(rho).into_iter().enumerate() {
        out[i] *= dp;
        out[n + i] *= dq;
    }
    Ok(out)
}

/// `B_ρ` applied pointwise in time to a loop, computed exactly on the
/// coefficients.
///
/// In the plane `(p_i, q_i)` write the diagonal factor as `D = sI + δK` with
/// `s = (d_p+d_q)/2`, `δ = (d_p−d_q)/2` and `K = diag(1, −1)`. Since
/// `K exp(θJ) = exp(−θJ) K`, the product `D z(t)` has coefficients
/// `s a_k + δ K a_{−k}`, which stays in `E_m`.
pub fn scale_loop(z: &FourierLoop, rho: f64, profile: &ScalingProfile) -> Result<FourierLoop> {
    check_rho(rho)?;
    let n = z.half_dim();
    if profile.half_dim() != n {
        return Err(Error::Dimension(format!(
            "profile has n = {}, loop has n = {n}",
            profile.half_dim()
        )));
    }
    let m = z.m() as i64;
    let factors = profile.factors(rho);
    let mut out = FourierLoop::zeros(n, z.m(), z.period());
    for k in -m..=m {
        let a = z.coeff(k);
        let a_rev = z.coeff(-k);
        let b = out.coeff_mut(k);
        for (i, &(dp, dq)) in factors.iter().enumerate() {
            let s = 0.5 * (dp + dq);
            let d = 0.5 * (dp - dq);
            b[i] = s * a[i] + d * a_rev[i];
            b[n + i] = s * a[n + i] - d * a_rev[n + i];
        }
    }
    Ok(out)
}
