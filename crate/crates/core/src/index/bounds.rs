//! Index iteration inequalities, the positivity lower bound and the
//! minimal-period certificate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::MatrixFunction;

use super::IndexPair;

/// A two-sided integer bound `lower ≤ value ≤ upper`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lower: i64,
    pub value: i64,
    pub upper: i64,
    pub holds: bool,
}

impl BoundCheck {
    fn new(lower: i64, value: i64, upper: i64) -> Self {
        Self {
            lower,
            value,
            upper,
            holds: lower <= value && value <= upper,
        }
    }
}

/// Both iteration inequalities for one `k`.
///
/// `basic` is `k(i+ν−n) − n ≤ i_k ≤ k(i+n) + n − ν_k`;
/// `refined` is `k(i+ν−n) + n − ν ≤ i_k ≤ k(i+n) − n − (ν_k − ν)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationReport {
    pub k: usize,
    pub basic: BoundCheck,
    pub refined: BoundCheck,
}

impl IterationReport {
    pub fn ok(&self) -> bool {
        self.basic.holds && self.refined.holds
    }
}

pub fn check_iteration_bounds(base: &IndexPair, iter: &IndexPair, k: usize) -> Result<IterationReport> {
    if k == 0 {
        return Err(Error::InvalidInput("iteration count must be positive".into()));
    }
    if base.n != iter.n {
        return Err(Error::InvalidInput(format!(
            "half-dimensions differ: {} vs {}",
            base.n, iter.n
        )));
    }
    let expected = k as f64 * base.period;
    if (iter.period - expected).abs() > 1e-9 * expected.abs().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "iterated period {} is not {k} × {}",
            iter.period, base.period
        )));
    }
    let n = base.n as i64;
    let k = k as i64;
    let (i, nu) = (base.i, base.nu as i64);
    let (ik, nuk) = (iter.i, iter.nu as i64);
    Ok(IterationReport {
        k: k as usize,
        basic: BoundCheck::new(k * (i + nu - n) - n, ik, k * (i + n) + n - nuk),
        refined: BoundCheck::new(k * (i + nu - n) + n - nu, ik, k * (i + n) - n - (nuk - nu)),
    })
}

/// Checks `i ≥ n` for a path that is positive semidefinite everywhere and
/// positive definite somewhere. A path violating that hypothesis yields
/// [`Error::Hypothesis`], which is not a counterexample to the bound.
pub fn check_positivity_lower_bound<F: MatrixFunction + ?Sized>(
    b: &F,
    pair: &IndexPair,
    tol: f64,
) -> Result<bool> {
    let mut strict = false;
    for (t, m) in b.check_points() {
        let lam = m.symmetric_eigenvalues().min();
        if lam < -tol {
            return Err(Error::Hypothesis(format!(
                "B({t:.6}) has eigenvalue {lam:.3e} < 0"
            )));
        }
        strict |= lam > tol;
    }
    if !strict {
        return Err(Error::Hypothesis(
            "B(t) is nowhere strictly positive on the sample grid".into(),
        ));
    }
    Ok(pair.i >= pair.n as i64)
}

/// Result of [`minimal_period_certificate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalPeriodCertificate {
    /// Largest `k` at which `i_{kτ} ≤ n+1`, `i_τ ≥ n` and `ν_τ ≥ 1` all hold,
    /// or `None` when they hold for no `k`.
    pub certified_k: Option<usize>,
    /// Every `k > 1` at which the hypotheses hold. Any entry contradicts the
    /// theory and points at a numerical problem.
    pub contradictions: Vec<usize>,
}

impl MinimalPeriodCertificate {
    pub fn certifies_one(&self) -> bool {
        self.certified_k == Some(1) && self.contradictions.is_empty()
    }
}

/// `pairs[j]` is the index pair at period `(j+1)τ`; `pairs[0]` is the base.
pub fn minimal_period_certificate(pairs: &[IndexPair], n: usize) -> Result<MinimalPeriodCertificate> {
    let base = pairs
        .first()
        .ok_or_else(|| Error::InvalidInput("no index pairs supplied".into()))?;
    let n_i = n as i64;
    let base_ok = base.i >= n_i && base.nu >= 1;
    let holding: Vec<usize> = if base_ok {
        pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| p.i <= n_i + 1)
            .map(|(j, _)| j + 1)
            .collect()
    } else {
        Vec::new()
    };
    let contradictions: Vec<usize> = holding.iter().copied().filter(|&k| k > 1).collect();
    if !contradictions.is_empty() {
        log::warn!("minimal-period hypotheses hold at k = {contradictions:?} > 1");
    }
    Ok(MinimalPeriodCertificate {
        certified_k: holding.last().copied(),
        contradictions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(i: i64, nu: usize, period: f64) -> IndexPair {
        IndexPair::new(i, nu, period, 1).unwrap()
    }

    #[test]
    fn bounds_for_half_identity_at_two_iterations() {
        let r = check_iteration_bounds(&pair(1, 0, 1.0), &pair(1, 2, 2.0), 2).unwrap();
        assert_eq!((r.basic.lower, r.basic.upper), (-1, 3));
        assert_eq!((r.refined.lower, r.refined.upper), (1, 1));
        assert!(r.ok());
    }

    #[test]
    fn single_iteration_is_inside() {
        let r = check_iteration_bounds(&pair(-1, 2, 1.0), &pair(-1, 2, 1.0), 1).unwrap();
        assert!(r.ok());
    }

    #[test]
    fn mismatched_inputs_rejected() {
        assert!(check_iteration_bounds(&pair(1, 0, 1.0), &pair(1, 0, 3.0), 2).is_err());
        let other = IndexPair::new(1, 0, 2.0, 2).unwrap();
        assert!(check_iteration_bounds(&pair(1, 0, 1.0), &other, 2).is_err());
    }

    #[test]
    fn certificate_examples() {
        let c = minimal_period_certificate(&[pair(1, 2, 1.0)], 1).unwrap();
        assert!(c.certifies_one());
        let c = minimal_period_certificate(&[pair(1, 1, 1.0), pair(5, 0, 2.0)], 1).unwrap();
        assert_eq!(c.certified_k, Some(1));
        let c = minimal_period_certificate(&[pair(1, 1, 1.0), pair(2, 1, 2.0)], 1).unwrap();
        assert_eq!(c.contradictions, vec![2]);
        let c = minimal_period_certificate(&[pair(0, 1, 1.0)], 1).unwrap();
        assert_eq!(c.certified_k, None);
        assert!(minimal_period_certificate(&[], 1).is_err());
    }
}
