//! The anisotropic example
//! `H(z) = Σ |p_i|^{1+σ_i/τ_i} ln(1+p_i²) + |q_i|^{1+τ_i/σ_i} ln(1+q_i²)`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::{GrowthProfile, Hamiltonian, HamiltonianModel};

/// `h(x) = |x|^a ln(1+x²)` with `a > 1`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PowLog {
    a: f64,
}

/// `ln(1+x²)/x²`, continuous at 0.
fn log_ratio(x: f64) -> f64 {
    let y = x * x;
    if y < 1e-8 {
        1.0 - 0.5 * y + y * y / 3.0
    } else {
        y.ln_1p() / y
    }
}

impl PowLog {
    pub(crate) fn value(self, x: f64) -> f64 {
        x.abs().powf(self.a) * (x * x).ln_1p()
    }

    pub(crate) fn d1(self, x: f64) -> f64 {
        let ax = x.abs();
        let l = log_ratio(x);
        x.signum() * ax.powf(self.a + 1.0) * (self.a * l + 2.0 / (1.0 + x * x))
    }

    pub(crate) fn d2(self, x: f64) -> f64 {
        let a = self.a;
        let y = x * x;
        let l = log_ratio(x);
        x.abs().powf(a)
            * (a * (a - 1.0) * l + 4.0 * a / (1.0 + y) + 2.0 * (1.0 - y) / ((1.0 + y) * (1.0 + y)))
    }
}

/// Closed-form evaluation of the example.
#[derive(Clone, Debug)]
pub struct AnisotropicExample {
    /// Exponents `1+σ_i/τ_i` on `p_i`.
    pub(crate) ap: Vec<f64>,
    /// Exponents `1+τ_i/σ_i` on `q_i`.
    pub(crate) aq: Vec<f64>,
}

impl AnisotropicExample {
    fn parts(&self) -> impl Iterator<Item = (usize, PowLog)> + '_ {
        let n = self.ap.len();
        self.ap
            .iter()
            .map(|&a| PowLog { a })
            .chain(self.aq.iter().map(|&a| PowLog { a }))
            .enumerate()
            .take(2 * n)
    }
}

impl Hamiltonian for AnisotropicExample {
    fn value(&self, _t: f64, z: &[f64]) -> f64 {
        self.parts().map(|(j, h)| h.value(z[j])).sum()
    }

    fn gradient(&self, _t: f64, z: &[f64]) -> DVector<f64> {
        DVector::from_iterator(z.len(), self.parts().map(|(j, h)| h.d1(z[j])))
    }

    fn hessian(&self, _t: f64, z: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            z.len(),
            self.parts().map(|(j, h)| h.d2(z[j])),
        ))
    }
}

/// Log-spaced scan points on `[1e-3, 1e6]` together with 0.
fn scan_points() -> impl Iterator<Item = f64> {
    std::iter::once(0.0).chain((0..=900).map(|i| 10f64.powf(-3.0 + i as f64 / 100.0)))
}

/// Growth constants for the example.
///
/// With `α_i = τ_i/(σ_i+τ_i)` one has `(1+σ_i/τ_i)α_i = 1`, so the logarithms
/// cancel in `H′·V₁ − H = Σ 2w_j|x_j|^{e_j+2}/(1+x_j²)`. Each summand is at
/// least `w_j|x_j|^β − w_j`, which gives `c₁ = min_j w_j · min(1, (2n)^{1−β/2})`
/// and the `c₂ ≥ n` part. The (H3) and (H3)′ parts of `c₂` come from a scan.
fn growth(sigma: &[f64], tau: &[f64], ap: &[f64], aq: &[f64]) -> GrowthProfile {
    let n = sigma.len();
    let alpha: Vec<f64> = sigma.iter().zip(tau).map(|(s, t)| t / (s + t)).collect();
    let beta_w: Vec<f64> = sigma.iter().zip(tau).map(|(s, t)| s / (s + t)).collect();
    let beta = ap.iter().chain(aq).copied().fold(f64::INFINITY, f64::min);
    let lo = sigma
        .iter()
        .zip(tau)
        .map(|(s, t)| (s / t).max(t / s))
        .fold(0.0, f64::max);
    let lambda = 0.5 * (lo + 1.0 + beta);
    let mw = alpha.iter().chain(&beta_w).copied().fold(f64::INFINITY, f64::min);
    let c1 = mw * (2.0 * n as f64).powf(1.0 - beta / 2.0).min(1.0);

    let weights: Vec<f64> = alpha.iter().chain(&beta_w).copied().collect();
    let exps: Vec<f64> = ap.iter().chain(aq).copied().collect();
    let mut c2_h3: f64 = 0.0;
    let mut c2_h3p = 0.0;
    for (&w, &e) in weights.iter().zip(&exps) {
        let h = PowLog { a: e };
        let mut worst: f64 = 0.0;
        for x in scan_points() {
            c2_h3 = c2_h3.max(h.d2(x).abs() / (x.powf(lambda - 1.0) + 1.0));
            let lhs = 2.0 * w * x.powf(e + 2.0) / (1.0 + x * x);
            worst = worst.max(c1 * h.d1(x).abs() - lhs);
        }
        c2_h3p += worst;
    }
    let c2 = 1.05 * (n as f64).max(c2_h3).max(c2_h3p);
    GrowthProfile {
        beta,
        c1,
        c2,
        alpha: alpha.clone(),
        beta_w: beta_w.clone(),
        xi: Some(alpha),
        eta_w: Some(beta_w),
        sigma: sigma.to_vec(),
        tau_exp: tau.to_vec(),
        lambda,
        phi: None,
        psi: None,
        theta: None,
        r0: None,
        b1: None,
        b2: None,
    }
}

/// The autonomous example model with closed-form derivatives and period `2π`.
///
/// For strongly anisotropic exponents (ratio `σ_i/τ_i` beyond `1+√2`) the
/// interval `Λ` is empty. The model is still returned; its growth profile then
/// fails validation and the (H3) check reports the violation.
pub fn example_anisotropic(n: usize, sigma: &[f64], tau_exp: &[f64]) -> Result<HamiltonianModel> {
    if sigma.len() != n || tau_exp.len() != n {
        return Err(Error::Dimension(format!(
            "expected {n} exponents, got {} and {}",
            sigma.len(),
            tau_exp.len()
        )));
    }
    if sigma.iter().chain(tau_exp).any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidInput("exponents must be positive".into()));
    }
    let ap: Vec<f64> = sigma.iter().zip(tau_exp).map(|(s, t)| 1.0 + s / t).collect();
    let aq: Vec<f64> = sigma.iter().zip(tau_exp).map(|(s, t)| 1.0 + t / s).collect();
    let g = growth(sigma, tau_exp, &ap, &aq);
    HamiltonianModel::new(
        "example_anisotropic",
        n,
        std::f64::consts::TAU,
        true,
        Some(g),
        Arc::new(AnisotropicExample { ap, aq }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::testing::fd_errors;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reference_values() {
        let h = example_anisotropic(1, &[1.0], &[1.0]).unwrap();
        assert_eq!(h.value(0.0, &[0.0, 0.0]), 0.0);
        assert_eq!(h.gradient(0.0, &[0.0, 0.0]).norm(), 0.0);
        assert!((h.value(0.0, &[1.0, 1.0]) - 2.0 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = example_anisotropic(2, &[1.0, 1.5], &[1.0, 0.8]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let z: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
            let (eg, eh) = fd_errors(&h, 0.0, &z, 1e-5);
            assert!(eg < 1e-6 && eh < 1e-6, "{eg} {eh} at {z:?}");
        }
    }

    #[test]
    fn growth_profile_is_valid_for_moderate_anisotropy() {
        let h = example_anisotropic(2, &[1.0, 2.0], &[1.0, 1.0]).unwrap();
        h.growth().unwrap().validate().unwrap();
        let strong = example_anisotropic(1, &[3.0], &[1.0]).unwrap();
        assert!(strong.growth().unwrap().validate().is_err());
    }
}
