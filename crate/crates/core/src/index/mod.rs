//! Maslov-type index pairs `(i, ν)` of linear periodic Hamiltonian systems.
//!
//! Two independent engines are provided. The Galerkin engine counts the
//! eigenvalues of the truncated quadratic form `P_m(A − B)P_m` on the loop
//! space `E_m`: for `m` large enough the negative count exceeds
//! `½ dim E_m = n(2m + 1)` by exactly `i`, and the near-zero count equals `ν`.
//! The monodromy engine reads `ν = dim ker(γ(τ) − I)` off the fundamental
//! solution.

mod bounds;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::{
    fundamental_solution, standard_j, FlowOptions, MatrixFunction, Periodized, SymplecticPath,
};

pub use bounds::{
    check_iteration_bounds, check_positivity_lower_bound, minimal_period_certificate, BoundCheck,
    IterationReport, MinimalPeriodCertificate,
};

/// The index pair of a path on `[0, period]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexPair {
    pub i: i64,
    pub nu: usize,
    pub period: f64,
    pub n: usize,
}

impl IndexPair {
    pub fn new(i: i64, nu: usize, period: f64, n: usize) -> Result<Self> {
        if nu > 2 * n {
            return Err(Error::InvalidInput(format!("nullity {nu} exceeds 2n = {}", 2 * n)));
        }
        Ok(Self { i, nu, period, n })
    }

    /// Same `(i, ν)`, ignoring period and dimension.
    pub fn same_index(&self, other: &Self) -> bool {
        self.i == other.i && self.nu == other.nu
    }
}

/// Eigenvalue counts of `P_m(A − B)P_m` in an orthonormal basis of `E_m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GalerkinSpectrum {
    pub m: usize,
    pub plus: usize,
    pub minus: usize,
    pub zero: usize,
    pub d: f64,
    pub eigenvalues: Vec<f64>,
}

impl GalerkinSpectrum {
    pub fn dim(&self) -> usize {
        self.plus + self.minus + self.zero
    }
}

/// How the gap `d` separating `M⁰` from `M^±` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gap {
    /// Half the smallest eigenvalue magnitude above the zero tolerance,
    /// clamped to `[1e-10, 0.1·2π/T]`.
    Adaptive,
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GalerkinOptions {
    /// Truncation orders tried in turn until two consecutive ones agree.
    pub schedule: Vec<usize>,
    pub gap: Gap,
    /// Eigenvalues below `zero_tol · 2π/T` in magnitude are treated as zero
    /// when the gap is adaptive.
    pub zero_tol: f64,
}

impl Default for GalerkinOptions {
    fn default() -> Self {
        Self {
            schedule: vec![16, 32, 64, 128, 256],
            gap: Gap::Adaptive,
            zero_tol: 1e-7,
        }
    }
}

impl GalerkinOptions {
    /// A schedule starting at `m` and doubling up to `m_max`.
    pub fn doubling(m: usize, m_max: usize) -> Self {
        let mut schedule = vec![m.max(1)];
        while *schedule.last().unwrap() * 2 <= m_max {
            schedule.push(schedule.last().unwrap() * 2);
        }
        Self {
            schedule,
            ..Self::default()
        }
    }
}

/// Gram weight of mode `k` in the `E` inner product: `T·max(|k|, 1)`.
pub(crate) fn mode_weight(k: i64, period: f64) -> f64 {
    period * (k.unsigned_abs().max(1)) as f64
}

/// The symmetric matrix of `⟨(A − B)z, z⟩` in the orthonormal coordinates
/// `x_k = sqrt(w_k) a_k`, modes ordered `k = −m..=m`, each a block of `2n`.
pub fn galerkin_matrix<F: MatrixFunction + ?Sized>(b: &F, m: usize) -> DMatrix<f64> {
    let integrals = b.fourier_integrals(2 * m);
    assemble(b.half_dim(), b.period(), m, &integrals, true)
}

/// Builds `A − B` (or `−B` alone when `with_a` is false) from Fourier integrals
/// `C(p) = ∫B cos(pωt)`, `S(p) = ∫B sin(pωt)` for `p = 0..=2m`.
pub(crate) fn assemble(
    n: usize,
    period: f64,
    m: usize,
    integrals: &[(DMatrix<f64>, DMatrix<f64>)],
    with_a: bool,
) -> DMatrix<f64> {
    let dim = 2 * n;
    let size = dim * (2 * m + 1);
    let omega = 2.0 * std::f64::consts::PI / period;
    let j = standard_j(n);
    let c = |p: i64| &integrals[p.unsigned_abs() as usize].0;
    let s = |p: i64| -> DMatrix<f64> {
        let v = &integrals[p.unsigned_abs() as usize].1;
        if p < 0 {
            -v
        } else {
            v.clone()
        }
    };
    let mi = m as i64;
    let mut q = DMatrix::zeros(size, size);
    // Row mode l, column mode k:
    // ∫ e^{−lθJ} B e^{kθJ} = ½[C(l−k)+C(l+k)] + ½[S(k+l)+S(k−l)]J
    //                      − J½[S(l+k)+S(l−k)] − J½[C(l−k)−C(l+k)]J.
    for l in -mi..=mi {
        let wl = mode_weight(l, period);
        for k in l..=mi {
            let wk = mode_weight(k, period);
            let c_minus = c(l - k);
            let c_plus = c(l + k);
            let s_sum = s(l + k);
            let term = 0.5 * (c_minus + c_plus)
                + 0.5 * (&s_sum + s(k - l)) * &j
                - 0.5 * &j * (&s_sum + s(l - k))
                - 0.5 * &j * (c_minus - c_plus) * &j;
            let scale = -1.0 / (wl * wk).sqrt();
            let r0 = ((l + mi) as usize) * dim;
            let c0 = ((k + mi) as usize) * dim;
            for a in 0..dim {
                for bcol in 0..dim {
                    let v = if k == l {
                        0.5 * scale * (term[(a, bcol)] + term[(bcol, a)])
                    } else {
                        scale * term[(a, bcol)]
                    };
                    q[(r0 + a, c0 + bcol)] = v;
                    q[(c0 + bcol, r0 + a)] = v;
                }
            }
        }
    }
    if with_a {
        for k in -mi..=mi {
            let a = omega * k.signum() as f64;
            let r0 = ((k + mi) as usize) * dim;
            for c in 0..dim {
                q[(r0 + c, r0 + c)] += a;
            }
        }
    }
    q
}

/// Sorted eigenvalues of a symmetric matrix.
pub(crate) fn sorted_eigenvalues(q: DMatrix<f64>) -> Vec<f64> {
    let mut eigs: Vec<f64> = SymmetricEigen::new(q).eigenvalues.iter().copied().collect();
    eigs.sort_by(|a, b| a.total_cmp(b));
    eigs
}

/// Chooses `d` and counts eigenvalues into `(d, ∞)`, `(−∞, −d)`, `[−d, d]`.
pub(crate) fn classify(eigenvalues: Vec<f64>, m: usize, period: f64, gap: Gap, zero_tol: f64) -> GalerkinSpectrum {
    let omega = 2.0 * std::f64::consts::PI / period;
    let d = match gap {
        Gap::Fixed(d) => d,
        Gap::Adaptive => {
            let floor = zero_tol * omega;
            let smallest = eigenvalues
                .iter()
                .map(|x| x.abs())
                .filter(|&x| x > floor)
                .fold(f64::INFINITY, f64::min);
            (0.5 * smallest).max(floor).clamp(1e-10, 0.1 * omega)
        }
    };
    let minus = eigenvalues.iter().filter(|&&x| x < -d).count();
    let plus = eigenvalues.iter().filter(|&&x| x > d).count();
    let zero = eigenvalues.len() - minus - plus;
    GalerkinSpectrum {
        m,
        plus,
        minus,
        zero,
        d,
        eigenvalues,
    }
}

fn pair_from_spectrum(spec: &GalerkinSpectrum, n: usize, period: f64) -> Result<IndexPair> {
    let half = (n * (2 * spec.m + 1)) as i64;
    let i = spec.minus as i64 - half;
    if spec.zero > 2 * n {
        return Err(Error::InvalidInput(format!(
            "{} near-zero eigenvalues at m = {} exceed 2n = {}; the gap d = {:.3e} is too coarse",
            spec.zero,
            spec.m,
            2 * n,
            spec.d
        )));
    }
    IndexPair::new(i, spec.zero, period, n)
}

/// The Galerkin index pair at one fixed truncation order, without checking
/// stability in `m`.
pub fn index_pair_at<F: MatrixFunction + ?Sized>(
    b: &F,
    m: usize,
    gap: Gap,
    zero_tol: f64,
) -> Result<(IndexPair, GalerkinSpectrum)> {
    let eigs = sorted_eigenvalues(galerkin_matrix(b, m));
    let spec = classify(eigs, m, b.period(), gap, zero_tol);
    let pair = pair_from_spectrum(&spec, b.half_dim(), b.period())?;
    Ok((pair, spec))
}

/// The Galerkin index pair, escalating `m` along the schedule until two
/// consecutive truncations agree. The returned spectrum is the one at the
/// coarser of the two agreeing levels.
pub fn index_pair_galerkin<F: MatrixFunction + ?Sized>(
    b: &F,
    opts: &GalerkinOptions,
) -> Result<(IndexPair, GalerkinSpectrum)> {
    if opts.schedule.len() < 2 {
        return Err(Error::InvalidInput(
            "the truncation schedule needs at least two levels".into(),
        ));
    }
    let mut prev = index_pair_at(b, opts.schedule[0], opts.gap, opts.zero_tol)?;
    for &m in &opts.schedule[1..] {
        let next = index_pair_at(b, m, opts.gap, opts.zero_tol)?;
        if next.0.same_index(&prev.0) {
            log::debug!(
                "index pair ({}, {}) stable at m = {} and m = {m}",
                prev.0.i,
                prev.0.nu,
                prev.1.m
            );
            return Ok(prev);
        }
        log::debug!(
            "index pair changed from ({}, {}) at m = {} to ({}, {}) at m = {m}",
            prev.0.i,
            prev.0.nu,
            prev.1.m,
            next.0.i,
            next.0.nu
        );
        prev = next;
    }
    let m = *opts.schedule.last().unwrap();
    let coarse = index_pair_at(b, opts.schedule[opts.schedule.len() - 2], opts.gap, opts.zero_tol)?.0;
    Err(Error::Unstable {
        m,
        coarse,
        fine: prev.0,
    })
}

/// The index pair of the `k`-fold problem, `B` viewed as `kτ`-periodic.
pub fn index_pair_iterated<F: MatrixFunction>(
    b: &F,
    k: usize,
    opts: &GalerkinOptions,
) -> Result<IndexPair> {
    if k == 0 {
        return Err(Error::InvalidInput("iteration count must be positive".into()));
    }
    let per = Periodized::new(b, k);
    Ok(index_pair_galerkin(&per, opts)?.0)
}

/// `dim ker(γ(τ) − I)` by counting singular values below `rank_tol`.
pub fn nullity_from_monodromy(gamma: &SymplecticPath, rank_tol: f64) -> usize {
    let n = gamma.half_dim();
    let diff = gamma.end().matrix() - DMatrix::<f64>::identity(2 * n, 2 * n);
    diff.singular_values().iter().filter(|&&s| s < rank_tol).count()
}

/// Outcome of [`index_pair_reconciled`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconciledIndex {
    pub pair: IndexPair,
    pub galerkin: IndexPair,
    pub monodromy_nullity: usize,
    /// True when the two engines disagreed on `ν` and the monodromy value won.
    pub reconciled: bool,
    pub m: usize,
}

/// Galerkin index pair with ties in the zero classification broken by the
/// monodromy nullity. On disagreement the `ν` eigenvalues of smallest
/// magnitude are taken as the kernel and a warning is logged.
pub fn index_pair_reconciled<F: MatrixFunction + ?Sized>(
    b: &F,
    opts: &GalerkinOptions,
    flow: FlowOptions,
    rank_tol: f64,
) -> Result<ReconciledIndex> {
    let (galerkin, spec) = index_pair_galerkin(b, opts)?;
    let gamma = fundamental_solution(b, flow)?;
    let nu_m = nullity_from_monodromy(&gamma, rank_tol);
    if nu_m == galerkin.nu {
        return Ok(ReconciledIndex {
            pair: galerkin,
            galerkin,
            monodromy_nullity: nu_m,
            reconciled: false,
            m: spec.m,
        });
    }
    log::warn!(
        "Galerkin nullity {} disagrees with monodromy nullity {nu_m} at m = {}; using the monodromy value",
        galerkin.nu,
        spec.m
    );
    let mut by_size: Vec<f64> = spec.eigenvalues.clone();
    by_size.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let minus = by_size[nu_m..].iter().filter(|&&x| x < 0.0).count();
    let half = (b.half_dim() * (2 * spec.m + 1)) as i64;
    let pair = IndexPair::new(minus as i64 - half, nu_m, b.period(), b.half_dim())?;
    Ok(ReconciledIndex {
        pair,
        galerkin,
        monodromy_nullity: nu_m,
        reconciled: true,
        m: spec.m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::MatrixPath;
    use std::f64::consts::PI;

    fn constant(b: f64, n: usize, period: f64) -> MatrixPath {
        MatrixPath::constant(b * DMatrix::identity(2 * n, 2 * n), period).unwrap()
    }

    #[test]
    fn zero_path_has_pure_a_spectrum() {
        for period in [1.0, 2.0 * PI, 7.5] {
            let (pair, spec) = index_pair_galerkin(&constant(0.0, 1, period), &GalerkinOptions::default()).unwrap();
            assert_eq!((pair.i, pair.nu), (-1, 2));
            assert_eq!((spec.minus, spec.zero, spec.plus), (32, 2, 32));
        }
    }

    #[test]
    fn constant_half_identity() {
        let (pair, _) = index_pair_galerkin(&constant(0.5, 1, 2.0 * PI), &GalerkinOptions::default()).unwrap();
        assert_eq!((pair.i, pair.nu), (1, 0));
        let (pair, _) = index_pair_galerkin(&constant(1.0, 1, 2.0 * PI), &GalerkinOptions::default()).unwrap();
        assert_eq!((pair.i, pair.nu), (1, 2));
    }

    #[test]
    fn constant_mode_eigenvalues_match_closed_form() {
        let b = 0.3;
        let q = galerkin_matrix(&constant(b, 1, 2.0 * PI), 3);
        let eigs = sorted_eigenvalues(q);
        let mut expected = vec![];
        for k in -3i64..=3 {
            let v = if k == 0 { -b } else { k.signum() as f64 - b / k.abs() as f64 };
            expected.extend([v, v]);
        }
        expected.sort_by(|a, b| a.total_cmp(b));
        for (a, e) in eigs.iter().zip(&expected) {
            assert!((a - e).abs() < 1e-12, "{a} vs {e}");
        }
    }

    #[test]
    fn galerkin_matrix_is_symmetric_for_general_paths() {
        let p = MatrixPath::from_fn(2, 3.0, 48, |t| {
            let w = 2.0 * PI * t / 3.0;
            DMatrix::from_fn(4, 4, |r, c| ((r + 2 * c + 1) as f64 * w).cos() + ((r * c) as f64 * w).sin())
        })
        .unwrap();
        let q = galerkin_matrix(&p, 5);
        assert!((&q - q.transpose()).norm() < 1e-12);
        assert_eq!(q.nrows(), 4 * 11);
    }

    #[test]
    fn iterated_constant_paths() {
        let p = constant(0.5, 1, 2.0 * PI);
        let opts = GalerkinOptions::default();
        let pairs: Vec<(i64, usize)> = [1, 2, 3]
            .iter()
            .map(|&k| {
                let q = index_pair_iterated(&p, k, &opts).unwrap();
                (q.i, q.nu)
            })
            .collect();
        assert_eq!(pairs, vec![(1, 0), (1, 2), (3, 0)]);
    }

    #[test]
    fn monodromy_nullity_examples() {
        let id = fundamental_solution(&constant(1.0, 1, 2.0 * PI), FlowOptions::steps(2048)).unwrap();
        assert_eq!(nullity_from_monodromy(&id, 1e-6), 2);
        let half = fundamental_solution(&constant(1.0, 1, PI), FlowOptions::steps(2048)).unwrap();
        assert_eq!(nullity_from_monodromy(&half, 1e-6), 0);
        let zero = fundamental_solution(&constant(0.0, 2, 1.0), FlowOptions::steps(8)).unwrap();
        assert_eq!(nullity_from_monodromy(&zero, 1e-6), 4);
    }

    #[test]
    fn unstable_schedule_is_reported() {
        // A single level can never be confirmed.
        let opts = GalerkinOptions {
            schedule: vec![4],
            ..GalerkinOptions::default()
        };
        assert!(index_pair_galerkin(&constant(0.5, 1, 1.0), &opts).is_err());
    }

    #[test]
    fn reconciled_agrees_on_clean_input() {
        let r = index_pair_reconciled(
            &constant(1.0, 1, 2.0 * PI),
            &GalerkinOptions::default(),
            FlowOptions::steps(2048),
            1e-6,
        )
        .unwrap();
        assert!(!r.reconciled);
        assert_eq!((r.pair.i, r.pair.nu), (1, 2));
    }
}
