//! Models of the form `H = ½(B̂(t)z, z) + Ĥ(t, z)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::symplectic::MatrixFunction;

use super::sampling::directions;
use super::{Hamiltonian, HamiltonianModel};

/// A symmetric periodic path `B̂(t)` with `ω = max_t |B̂(t)|`.
///
/// `ω` is the largest spectral norm over the path's check points, which is the
/// exact maximum for piecewise-linear paths since the norm is convex.
#[derive(Clone)]
pub struct QuadraticTerm {
    path: Arc<dyn MatrixFunction + Send + Sync>,
    omega: f64,
}

impl fmt::Debug for QuadraticTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadraticTerm")
            .field("n", &self.path.half_dim())
            .field("period", &self.path.period())
            .field("omega", &self.omega)
            .finish()
    }
}

impl QuadraticTerm {
    pub fn new(path: impl MatrixFunction + Send + Sync + 'static) -> Self {
        let omega = path
            .check_points()
            .iter()
            .map(|(_, b)| b.clone().svd(false, false).singular_values.max())
            .fold(0.0, f64::max);
        Self {
            path: Arc::new(path),
            omega,
        }
    }

    pub fn half_dim(&self) -> usize {
        self.path.half_dim()
    }

    pub fn period(&self) -> f64 {
        self.path.period()
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn eval(&self, t: f64) -> DMatrix<f64> {
        self.path.eval(t)
    }

    pub fn path(&self) -> &(dyn MatrixFunction + Send + Sync) {
        self.path.as_ref()
    }
}

struct WithQuadratic {
    base: Arc<dyn Hamiltonian>,
    bhat: QuadraticTerm,
}

impl Hamiltonian for WithQuadratic {
    fn value(&self, t: f64, z: &[f64]) -> f64 {
        let zv = DVector::from_column_slice(z);
        0.5 * zv.dot(&(self.bhat.eval(t) * &zv)) + self.base.value(t, z)
    }

    fn gradient(&self, t: f64, z: &[f64]) -> DVector<f64> {
        self.bhat.eval(t) * DVector::from_column_slice(z) + self.base.gradient(t, z)
    }

    fn hessian(&self, t: f64, z: &[f64]) -> DMatrix<f64> {
        self.bhat.eval(t) + self.base.hessian(t, z)
    }
}

/// Radii `10^j`, `j = −4..4`.
pub(crate) fn ladder() -> Vec<f64> {
    (-4..=4).map(|j| 10f64.powi(j)).collect()
}

/// `½(B̂z, z) + Ĥ`, rejected with a witness if it is negative somewhere on the
/// radius ladder.
///
/// An autonomous `Ĥ` adopts the period of `B̂`; otherwise the periods must agree.
pub fn with_quadratic_term(model: &HamiltonianModel, bhat: QuadraticTerm) -> Result<HamiltonianModel> {
    let n = model.half_dim();
    if bhat.half_dim() != n {
        return Err(Error::Dimension(format!(
            "B̂ has n = {}, model has n = {n}",
            bhat.half_dim()
        )));
    }
    if !model.autonomous() && (model.period() - bhat.period()).abs() > 1e-12 * model.period() {
        return Err(Error::InvalidInput(format!(
            "periods differ: model {} vs B̂ {}",
            model.period(),
            bhat.period()
        )));
    }
    let period = bhat.period();
    let inner = WithQuadratic {
        base: model.inner().clone(),
        bhat: bhat.clone(),
    };
    for r in ladder() {
        for (t, dir) in directions(2 * n, 256, period) {
            let z: Vec<f64> = dir.iter().map(|x| x * r).collect();
            let value = inner.value(t, &z);
            if value < -1e-12 * r * r * (1.0 + bhat.omega()) {
                return Err(Error::NegativeModel {
                    reason: "½(B̂z,z) + Ĥ is negative".into(),
                    t,
                    z,
                    value,
                });
            }
        }
    }
    let mut out = HamiltonianModel::new(
        format!("{}_quadratic", model.name()),
        n,
        period,
        false,
        model.growth().cloned(),
        Arc::new(inner),
    )?;
    out.quadratic = Some(bhat);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::testing::fd_errors;
    use crate::hamiltonians::{example_anisotropic, zero_model};
    use crate::symplectic::{FnMatrixPath, MatrixPath};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn offdiag(n: usize, c: f64) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            b[(i, n + i)] = c;
            b[(n + i, i)] = c;
        }
        b
    }

    #[test]
    fn zero_term_is_identity() {
        let h = example_anisotropic(1, &[1.0], &[1.0]).unwrap();
        let b = QuadraticTerm::new(MatrixPath::constant(DMatrix::zeros(2, 2), TAU).unwrap());
        let hq = with_quadratic_term(&h, b).unwrap();
        let z = [0.3, -1.2];
        assert_eq!(hq.value(1.0, &z), h.value(1.0, &z));
        assert_eq!(hq.gradient(1.0, &z), h.gradient(1.0, &z));
    }

    #[test]
    fn composite_derivatives() {
        let h = example_anisotropic(2, &[1.0, 1.3], &[1.0, 1.0]).unwrap();
        let path = FnMatrixPath::new(2, TAU, |t| DMatrix::identity(4, 4) * (0.1 * (1.0 + 0.5 * t.cos()))).unwrap();
        let bhat = QuadraticTerm::new(path);
        assert!((bhat.omega() - 0.15).abs() < 1e-12);
        let hq = with_quadratic_term(&h, bhat).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let z: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
            let (eg, eh) = fd_errors(&hq, rng.random_range(0.0..TAU), &z, 1e-5);
            assert!(eg < 1e-6 && eh < 1e-6);
        }
    }

    #[test]
    fn negativity_rejected() {
        let h = zero_model(1, TAU).unwrap();
        let b = QuadraticTerm::new(MatrixPath::constant(offdiag(1, 1.0), TAU).unwrap());
        match with_quadratic_term(&h, b) {
            Err(Error::NegativeModel { value, .. }) => assert!(value < 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
