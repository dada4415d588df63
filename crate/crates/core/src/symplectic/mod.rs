//! Symplectic linear algebra on `R^{2n}` with coordinates `z = (p_1..p_n, q_1..q_n)`.
//!
//! The standard structure is `J = [[0, -I_n], [I_n, 0]]`, so that a linear
//! Hamiltonian system `-J z' = B(t) z` reads `z' = J B(t) z`. Matrix-valued
//! coefficient paths live in [`path`], fundamental solutions and iteration in
//! [`flow`].

pub mod flow;
pub mod path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use flow::{fundamental_solution, iterate_path, FlowOptions, SymplecticPath};
pub use path::{FnMatrixPath, MatrixFunction, MatrixPath, Periodized};

/// Default tolerance for the symplectic residual `‖MᵀJM − J‖_F`.
pub const TOL_SP: f64 = 1e-8;
/// Default tolerance for symmetry of path samples.
pub const TOL_SYM: f64 = 1e-10;

/// The standard symplectic matrix of half-dimension `n`.
pub fn standard_j(n: usize) -> DMatrix<f64> {
    assert!(n >= 1, "half-dimension must be at least 1");
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

/// `J v` without building `J`.
pub fn apply_j(v: &[f64]) -> DVector<f64> {
    let n = v.len() / 2;
    let mut out = DVector::zeros(2 * n);
    for i in 0..n {
        out[i] = -v[n + i];
        out[n + i] = v[i];
    }
    out
}

/// `‖MᵀJM − J‖_F`.
pub fn symplectic_residual(m: &DMatrix<f64>) -> Result<f64> {
    let n = half_dim_of(m)?;
    let j = standard_j(n);
    Ok((m.transpose() * &j * m - j).norm())
}

pub fn is_symplectic(m: &DMatrix<f64>, tol: f64) -> Result<bool> {
    Ok(symplectic_residual(m)? <= tol)
}

fn half_dim_of(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "matrix is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 || m.nrows() % 2 != 0 {
        return Err(Error::Dimension(format!(
            "matrix dimension {} is not a positive even number",
            m.nrows()
        )));
    }
    Ok(m.nrows() / 2)
}

/// A `2n × 2n` real matrix checked to lie in `Sp(2n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMatrix {
    entries: DMatrix<f64>,
    n: usize,
}

impl SymplecticMatrix {
    pub fn new(entries: DMatrix<f64>, tol: f64) -> Result<Self> {
        let n = half_dim_of(&entries)?;
        let res = symplectic_residual(&entries)?;
        if res > tol {
            return Err(Error::InvalidInput(format!(
                "symplectic residual {res:.3e} exceeds tolerance {tol:.1e}"
            )));
        }
        if entries.determinant() <= 0.0 {
            return Err(Error::InvalidInput("determinant is not positive".into()));
        }
        Ok(Self { entries, n })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: DMatrix::identity(2 * n, 2 * n),
            n,
        }
    }

    /// Wraps a matrix produced by a trusted symplectic computation.
    pub(crate) fn from_trusted(entries: DMatrix<f64>) -> Self {
        let n = entries.nrows() / 2;
        Self { entries, n }
    }

    pub fn half_dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.entries).expect("validated dimension")
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = DMatrix::identity(2 * self.n, 2 * self.n);
        for _ in 0..k {
            out = &self.entries * out;
        }
        Self::from_trusted(out)
    }
}

/// Projects a nearly symplectic matrix onto `Sp(2n)` with the Newton–Schulz
/// type iteration `X ← ½X(3I − X^⋆X)`, `X^⋆ = JᵀXᵀJ`, which converges to the
/// generalized polar factor of `X` in the symplectic group.
pub fn project_symplectic(m: &DMatrix<f64>, tol: f64, max_iter: usize) -> DMatrix<f64> {
    let n = m.nrows() / 2;
    let j = standard_j(n);
    let jt = j.transpose();
    let id = DMatrix::<f64>::identity(2 * n, 2 * n);
    let mut x = m.clone();
    for _ in 0..max_iter {
        let star = &jt * x.transpose() * &j;
        let sx = star * &x;
        if (&sx - &id).norm() <= tol {
            break;
        }
        x = 0.5 * &x * (3.0 * &id - sx);
    }
    x
}

/// The diagonal scaling `V(a, b) = diag(a_1..a_n, b_1..b_n)` acting on `(p, q)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalScaling {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl DiagonalScaling {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::Dimension(format!(
                "scaling halves have lengths {} and {}",
                a.len(),
                b.len()
            )));
        }
        if a.iter().chain(&b).any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidInput(
                "scaling entries must be finite and strictly positive".into(),
            ));
        }
        Ok(Self { a, b })
    }

    /// A weight pair `V(α, β)` whose entries satisfy `α_i + β_i = 1`.
    pub fn weights(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        let v = Self::new(alpha, beta)?;
        for (i, (x, y)) in v.a.iter().zip(&v.b).enumerate() {
            if (x + y - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "weights at index {i} sum to {} instead of 1",
                    x + y
                )));
            }
        }
        Ok(v)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            a: vec![1.0; n],
            b: vec![1.0; n],
        }
    }

    pub fn half_dim(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn apply(&self, z: &[f64]) -> Result<DVector<f64>> {
        let n = self.a.len();
        if z.len() != 2 * n {
            return Err(Error::Dimension(format!(
                "vector has length {}, scaling expects {}",
                z.len(),
                2 * n
            )));
        }
        Ok(DVector::from_fn(2 * n, |i, _| {
            if i < n {
                self.a[i] * z[i]
            } else {
                self.b[i - n] * z[i]
            }
        }))
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let diag: Vec<f64> = self.a.iter().chain(&self.b).copied().collect();
        DMatrix::from_diagonal(&DVector::from_vec(diag))
    }
}
