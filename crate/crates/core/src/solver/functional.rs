//! The truncated action functional `f_m(z) = ½⟨Az,z⟩ − ∫₀ᵀ H(t,z)dt` and the
//! linearization of a model along a loop.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonians::HamiltonianModel;
use crate::index::{assemble, classify, sorted_eigenvalues, Gap, GalerkinSpectrum};
use crate::loopspace::{a_form, same_period, FourierLoop, Grid};
use crate::symplectic::path::{trapezoid_fourier_from_samples, FourierIntegrals};
use crate::symplectic::MatrixFunction;

/// `B(t) = H″(t, z(t))` along a fixed loop.
///
/// Fourier integrals use the uniform grid the loop's functional integrates on
/// whenever it resolves the requested order, so the Galerkin matrix of this
/// path at truncation `m` is the exact Hessian of the discrete `f_m`.
#[derive(Clone, Debug)]
pub struct LinearizedPath {
    model: HamiltonianModel,
    z: FourierLoop,
    n_t: usize,
}

impl LinearizedPath {
    pub fn new(model: &HamiltonianModel, z: &FourierLoop, n_t: usize) -> Result<Self> {
        if z.half_dim() != model.half_dim() {
            return Err(Error::Dimension(format!(
                "loop has n = {}, model has n = {}",
                z.half_dim(),
                model.half_dim()
            )));
        }
        Ok(Self {
            model: model.clone(),
            z: z.clone(),
            n_t,
        })
    }

    pub fn loop_ref(&self) -> &FourierLoop {
        &self.z
    }

    /// The same linearization for the loop shifted by `s`.
    pub fn shifted(&self, s: f64) -> Self {
        Self {
            model: self.model.clone(),
            z: self.z.shifted(s),
            n_t: self.n_t,
        }
    }
}

impl MatrixFunction for LinearizedPath {
    fn half_dim(&self) -> usize {
        self.model.half_dim()
    }

    fn period(&self) -> f64 {
        self.z.period()
    }

    fn eval(&self, t: f64) -> DMatrix<f64> {
        self.model.hessian(t, self.z.eval(t).as_slice())
    }

    fn fourier_integrals(&self, p_max: usize) -> FourierIntegrals {
        let n_q = if 4 * p_max <= self.n_t {
            self.n_t
        } else {
            (4 * p_max).max(2 * self.z.m() + 1)
        };
        let grid = Grid::new(n_q, self.z.period());
        let samples: Vec<DMatrix<f64>> = grid
            .synthesize(&self.z)
            .iter()
            .enumerate()
            .map(|(j, zj)| self.model.hessian(grid.time(j), zj.as_slice()))
            .collect();
        trapezoid_fourier_from_samples(&samples, self.z.period(), p_max, 2 * self.model.half_dim())
    }

    fn check_points(&self) -> Vec<(f64, DMatrix<f64>)> {
        let grid = Grid::new(self.n_t, self.z.period());
        grid.synthesize(&self.z)
            .iter()
            .enumerate()
            .map(|(j, zj)| (grid.time(j), self.model.hessian(grid.time(j), zj.as_slice())))
            .collect()
    }
}

/// Counts of the Hessian spectrum of `f_m` at a loop.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HessianSpectrum {
    pub morse_index: usize,
    pub nullity: usize,
    pub positive: usize,
    pub d: f64,
    pub eigenvalues: Vec<f64>,
}

impl From<GalerkinSpectrum> for HessianSpectrum {
    fn from(s: GalerkinSpectrum) -> Self {
        Self {
            morse_index: s.minus,
            nullity: s.zero,
            positive: s.plus,
            d: s.d,
            eigenvalues: s.eigenvalues,
        }
    }
}

/// `f_m` on `E_m` for one model and period, with a fixed quadrature grid.
#[derive(Clone, Debug)]
pub struct ActionFunctional {
    model: HamiltonianModel,
    m: usize,
    period: f64,
    grid: Grid,
}

impl ActionFunctional {
    /// Default grid size `max(8m, 256)`.
    ///
    /// For a time-dependent model the period must be a positive integer
    /// multiple of the model's period.
    pub fn new(model: &HamiltonianModel, m: usize, period: f64) -> Result<Self> {
        Self::with_grid(model, m, period, (8 * m).max(256))
    }

    pub fn with_grid(model: &HamiltonianModel, m: usize, period: f64, n_t: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("truncation m must be at least 1".into()));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidInput(format!("period {period} must be positive")));
        }
        if n_t < 2 * m + 1 {
            return Err(Error::InvalidInput(format!(
                "grid size {n_t} does not resolve modes up to {m}"
            )));
        }
        if !model.autonomous() {
            let ratio = period / model.period();
            if ratio < 0.5 || (ratio - ratio.round()).abs() > 1e-9 * ratio {
                return Err(Error::InvalidInput(format!(
                    "period {period} is not a multiple of the model period {}",
                    model.period()
                )));
            }
        }
        Ok(Self {
            model: model.clone(),
            m,
            period,
            grid: Grid::new(n_t, period),
        })
    }

    pub fn model(&self) -> &HamiltonianModel {
        &self.model
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn grid_size(&self) -> usize {
        self.grid.len()
    }

    pub fn half_dim(&self) -> usize {
        self.model.half_dim()
    }

    /// `dim E_m`.
    pub fn dim(&self) -> usize {
        2 * self.half_dim() * (2 * self.m + 1)
    }

    pub fn zero_loop(&self) -> FourierLoop {
        FourierLoop::zeros(self.half_dim(), self.m, self.period)
    }

    fn check(&self, z: &FourierLoop) -> Result<()> {
        if z.half_dim() != self.half_dim() || z.m() != self.m || !same_period(z.period(), self.period) {
            return Err(Error::Dimension(format!(
                "loop in (n, m, T) = ({}, {}, {}) but functional on ({}, {}, {})",
                z.half_dim(),
                z.m(),
                z.period(),
                self.half_dim(),
                self.m,
                self.period
            )));
        }
        Ok(())
    }

    pub fn loop_from_coords(&self, x: &DVector<f64>) -> FourierLoop {
        FourierLoop::from_coords(self.half_dim(), self.m, self.period, x).expect("valid space")
    }

    pub fn value(&self, z: &FourierLoop) -> Result<f64> {
        self.check(z)?;
        let samples = self.grid.synthesize(z);
        let h = self
            .grid
            .integrate(samples.iter().enumerate().map(|(j, zj)| self.model.value(self.grid.time(j), zj.as_slice())));
        Ok(0.5 * a_form(z, z)? - h)
    }

    /// The gradient in orthonormal coordinates `x_k = sqrt(w_k) a_k`.
    pub fn gradient_coords(&self, z: &FourierLoop) -> Result<DVector<f64>> {
        self.check(z)?;
        let samples = self.grid.synthesize(z);
        let hz: Vec<DVector<f64>> = samples
            .iter()
            .enumerate()
            .map(|(j, zj)| self.model.gradient(self.grid.time(j), zj.as_slice()))
            .collect();
        let p = self.grid.analyze(&hz, self.m);
        let w = 2 * self.half_dim();
        let mut g = DVector::zeros(z.dim());
        for ((k, a), (_, pk)) in z.modes().zip(p.modes()) {
            let o = (k + self.m as i64) as usize * w;
            let sw = z.weight(k).sqrt();
            for i in 0..w {
                g[o + i] = (2.0 * std::f64::consts::PI * k as f64 * a[i] - self.period * pk[i]) / sw;
            }
        }
        Ok(g)
    }

    /// The `E`-Riesz representative of `df_m(z)`.
    pub fn gradient(&self, z: &FourierLoop) -> Result<FourierLoop> {
        Ok(self.loop_from_coords(&self.gradient_coords(z)?))
    }

    /// `‖∇f_m(z)‖` in the `E`-norm.
    pub fn residual(&self, z: &FourierLoop) -> Result<f64> {
        Ok(self.gradient_coords(z)?.norm())
    }

    pub fn linearization(&self, z: &FourierLoop) -> Result<LinearizedPath> {
        self.check(z)?;
        LinearizedPath::new(&self.model, z, self.grid.len())
    }

    /// The Hessian of `f_m` in orthonormal coordinates.
    pub fn hessian(&self, z: &FourierLoop) -> Result<DMatrix<f64>> {
        let lin = self.linearization(z)?;
        let integrals = lin.fourier_integrals(2 * self.m);
        Ok(assemble(self.half_dim(), self.period, self.m, &integrals, true))
    }

    /// Eigenvalue counts of the Hessian below `−d`, within `[−d, d]`, above `d`.
    pub fn hessian_spectrum(&self, z: &FourierLoop, gap: Gap, zero_tol: f64) -> Result<HessianSpectrum> {
        let eigs = sorted_eigenvalues(self.hessian(z)?);
        Ok(classify(eigs, self.m, self.period, gap, zero_tol).into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{example_anisotropic, zero_model};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    fn random_loop(rng: &mut ChaCha8Rng, n: usize, m: usize, period: f64, scale: f64) -> FourierLoop {
        let dim = 2 * n * (2 * m + 1);
        let mut z = FourierLoop::from_coeffs(n, m, period, (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        for k in -(m as i64)..=m as i64 {
            let f = scale / (1.0 + k.abs() as f64).powi(2);
            z.coeff_mut(k).iter_mut().for_each(|x| *x *= f);
        }
        z
    }

    #[test]
    fn zero_loop_values() {
        let h = example_anisotropic(1, &[1.0], &[1.0]).unwrap();
        let f = ActionFunctional::new(&h, 4, TAU).unwrap();
        let z = f.zero_loop();
        assert_eq!(f.value(&z).unwrap(), 0.0);
        assert_eq!(f.residual(&z).unwrap(), 0.0);
    }

    #[test]
    fn pure_plus_loop_with_zero_model() {
        let h = zero_model(1, 3.0).unwrap();
        let f = ActionFunctional::new(&h, 3, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let z = random_loop(&mut rng, 1, 3, 3.0, 1.0).project(crate::loopspace::Part::Plus);
        let expect = PI / 3.0 * z.norm().powi(2);
        assert!((f.value(&z).unwrap() - expect).abs() < 1e-12 * expect);
        // ∇(½⟨Az,z⟩) = (2π/T)z on E⁺.
        let g = f.gradient(&z).unwrap();
        let diff = g.add_scaled(&z, -2.0 * PI / 3.0).unwrap();
        assert!(diff.norm() < 1e-12);
    }

    #[test]
    fn directional_derivatives() {
        let h = example_anisotropic(2, &[1.0, 1.4], &[1.0, 0.9]).unwrap();
        let f = ActionFunctional::new(&h, 6, TAU).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let z = random_loop(&mut rng, 2, 6, TAU, 0.5);
            let w = random_loop(&mut rng, 2, 6, TAU, 0.5);
            let g = f.gradient(&z).unwrap();
            let exact = g.inner(&w).unwrap();
            let hstep = 1e-5;
            let fd = (f.value(&z.add_scaled(&w, hstep).unwrap()).unwrap()
                - f.value(&z.add_scaled(&w, -hstep).unwrap()).unwrap())
                / (2.0 * hstep);
            assert!((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()), "{fd} vs {exact}");
        }
    }

    #[test]
    fn hessian_is_jacobian_of_gradient() {
        let h = example_anisotropic(1, &[1.0], &[1.0]).unwrap();
        let f = ActionFunctional::new(&h, 5, TAU).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = random_loop(&mut rng, 1, 5, TAU, 1.0);
        let w = random_loop(&mut rng, 1, 5, TAU, 1.0);
        let hx = f.hessian(&z).unwrap() * w.to_coords();
        let hstep = 1e-6;
        let fd = (f.gradient_coords(&z.add_scaled(&w, hstep).unwrap()).unwrap()
            - f.gradient_coords(&z.add_scaled(&w, -hstep).unwrap()).unwrap())
            / (2.0 * hstep);
        assert!((hx - &fd).norm() < 1e-6 * (1.0 + fd.norm()));
    }

    #[test]
    fn zero_model_spectrum() {
        let h = zero_model(1, TAU).unwrap();
        let f = ActionFunctional::new(&h, 2, TAU).unwrap();
        let s = f.hessian_spectrum(&f.zero_loop(), Gap::Adaptive, 1e-7).unwrap();
        assert_eq!((s.morse_index, s.nullity, s.positive), (4, 2, 4));
    }

    #[test]
    fn rejects_incommensurate_period() {
        let h = zero_model(1, TAU).unwrap();
        let b = crate::hamiltonians::QuadraticTerm::new(
            crate::symplectic::MatrixPath::constant(DMatrix::identity(2, 2) * 0.1, TAU).unwrap(),
        );
        let hq = crate::hamiltonians::with_quadratic_term(&h, b).unwrap();
        assert!(ActionFunctional::new(&hq, 4, 1.5 * TAU).is_err());
        assert!(ActionFunctional::new(&hq, 4, 2.0 * TAU).is_ok());
    }
}
