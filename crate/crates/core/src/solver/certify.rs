//! A-posteriori checks on computed orbits: shift distances, re-integration,
//! geometric distinctness of subharmonics and minimal periods.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonians::{check_hypotheses, HamiltonianModel, Hypothesis, SamplingSpec};
use crate::index::{index_pair_iterated, minimal_period_certificate, GalerkinOptions, Gap, IndexPair, MinimalPeriodCertificate};
use crate::loopspace::FourierLoop;
use crate::symplectic::apply_j;

use super::functional::LinearizedPath;
use super::saddle::SaddleResult;

/// Which time shifts count as symmetries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shifts {
    None,
    /// All `s ∈ [0, T)`.
    Continuous,
    /// `s = jτ`, `0 ≤ j < T/τ`.
    Multiples(f64),
}

/// `min_s ‖z(· + s) − w‖_E` over the allowed shifts, with the minimizing
/// shift. Loops must share `n` and `T`; truncations may differ.
pub fn shift_distance(z: &FourierLoop, w: &FourierLoop, shifts: Shifts) -> (f64, f64) {
    assert!(
        z.half_dim() == w.half_dim() && (z.period() - w.period()).abs() <= 1e-12 * z.period(),
        "shift distance needs loops of equal n and period"
    );
    let m = z.m().max(w.m());
    let (z, w) = (z.with_truncation(m), w.with_truncation(m));
    let period = z.period();
    let omega = 2.0 * std::f64::consts::PI / period;
    // ⟨z(·+s), w⟩ = Σ w_k [cos(kωs) a_k·b_k + sin(kωs) Ja_k·b_k].
    let terms: Vec<(f64, f64, f64)> = z
        .modes()
        .zip(w.modes())
        .map(|((k, a), (_, b))| {
            let wk = z.weight(k);
            let ab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            let jab: f64 = apply_j(a).iter().zip(b).map(|(x, y)| x * y).sum();
            (k as f64 * omega, wk * ab, wk * jab)
        })
        .collect();
    let cross = |s: f64| terms.iter().map(|(f, c, d)| c * (f * s).cos() + d * (f * s).sin()).sum::<f64>();
    let base = z.norm().powi(2) + w.norm().powi(2);
    let dist = |s: f64| (base - 2.0 * cross(s)).max(0.0).sqrt();
    match shifts {
        Shifts::None => (dist(0.0), 0.0),
        Shifts::Multiples(tau) => {
            let count = (period / tau).round().max(1.0) as usize;
            (0..count)
                .map(|j| (dist(j as f64 * tau), j as f64 * tau))
                .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a })
        }
        Shifts::Continuous => {
            let count = 16 * (m + 1);
            let h = period / count as f64;
            let (mut best, mut at) = (f64::INFINITY, 0.0);
            for j in 0..count {
                let d = dist(j as f64 * h);
                if d < best {
                    best = d;
                    at = j as f64 * h;
                }
            }
            // Golden-section refinement of the maximum of the cross term.
            let (mut lo, mut hi) = (at - h, at + h);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..80 {
                let a = hi - g * (hi - lo);
                let b = lo + g * (hi - lo);
                if cross(a) > cross(b) {
                    hi = b;
                } else {
                    lo = a;
                }
            }
            let s = 0.5 * (lo + hi);
            let d = dist(s);
            if d < best {
                (d, s.rem_euclid(period))
            } else {
                (best, at)
            }
        }
    }
}

/// `max_t |ζ(t) − z(t)|` where `ζ` solves `ζ̇ = JH′(t, ζ)`, `ζ(0) = z(0)`,
/// by classical Runge–Kutta with `steps` uniform steps over `[0, T]`.
pub fn reintegrate(model: &HamiltonianModel, z: &FourierLoop, steps: usize) -> Result<f64> {
    if steps < 2 {
        return Err(Error::InvalidInput("at least 2 steps required".into()));
    }
    let rhs = |t: f64, y: &DVector<f64>| apply_j(model.gradient(t, y.as_slice()).as_slice());
    let h = z.period() / steps as f64;
    let mut y = z.eval(0.0);
    let mut err: f64 = 0.0;
    for s in 0..steps {
        let t = s as f64 * h;
        let k1 = rhs(t, &y);
        let k2 = rhs(t + 0.5 * h, &(&y + &k1 * (0.5 * h)));
        let k3 = rhs(t + 0.5 * h, &(&y + &k2 * (0.5 * h)));
        let k4 = rhs(t + h, &(&y + &k3 * h));
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::IntegrationDiverged {
                t: t + h,
                reason: "non-finite state".into(),
            });
        }
        err = err.max((&y - z.eval(t + h)).amax());
    }
    Ok(err)
}

/// How distinctness was certified from index data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DistinctRoute {
    /// `p > 2n+1` with both index windows holding.
    IndexContradiction,
    /// Both solutions nondegenerate with `i = n+1`, any `p > 1`.
    Nondegenerate,
}

/// Outcome of [`distinctness_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistinctnessVerdict {
    pub p: usize,
    pub certified: bool,
    pub route: Option<DistinctRoute>,
    pub message: String,
    /// `min_j ‖j∗z_k^p − z_{pk}‖_E` over integer shifts `j`.
    pub shift_gap: f64,
    pub relative_gap: f64,
    pub best_shift: f64,
    /// The same minimum over all shifts, for autonomous problems.
    pub continuous_gap: f64,
    /// `shift_gap > 1e-3`.
    pub direct_distinct: bool,
}

fn window_holds(pair: Option<IndexPair>, n: usize) -> bool {
    let n = n as i64;
    pair.is_some_and(|p| p.i <= n + 1 && n + 1 <= p.i + p.nu as i64)
}

/// Whether `z_k` and `z_{pk}` are geometrically distinct, by index arithmetic
/// and by the direct shift gap between `z_k` iterated `p` times and `z_{pk}`.
pub fn distinctness_check(zk: &SaddleResult, zpk: &SaddleResult, p: usize, n: usize) -> Result<DistinctnessVerdict> {
    if p == 0 {
        return Err(Error::InvalidInput("p must be positive".into()));
    }
    if (zpk.period - p as f64 * zk.period).abs() > 1e-9 * zpk.period || zk.z.half_dim() != zpk.z.half_dim() {
        return Err(Error::InvalidInput(format!(
            "incompatible periods: {} is not {p} × {}",
            zpk.period, zk.period
        )));
    }
    let n_i = n as i64;
    let both_windows = window_holds(zk.maslov, n) && window_holds(zpk.maslov, n);
    let nondeg = |r: &SaddleResult| r.maslov.is_some_and(|m| m.nu == 0 && m.i == n_i + 1);
    let route = if p > 2 * n + 1 && both_windows {
        Some(DistinctRoute::IndexContradiction)
    } else if p > 1 && nondeg(zk) && nondeg(zpk) {
        Some(DistinctRoute::Nondegenerate)
    } else {
        None
    };
    let tau = zk.period / zk.k.max(1) as f64;
    let iterated = zk.z.iterate(p);
    let (shift_gap, best_shift) = shift_distance(&iterated, &zpk.z, Shifts::Multiples(tau));
    let (continuous_gap, _) = shift_distance(&iterated, &zpk.z, Shifts::Continuous);
    let relative_gap = shift_gap / zpk.z.norm().max(1e-300);
    let direct_distinct = shift_gap > 1e-3;
    let message = match route {
        Some(DistinctRoute::IndexContradiction) => "certified distinct by index contradiction".to_string(),
        Some(DistinctRoute::Nondegenerate) => "certified distinct: both solutions nondegenerate".to_string(),
        None if direct_distinct => "not certified by index data; distinct by shift gap".to_string(),
        None => "not distinct".to_string(),
    };
    Ok(DistinctnessVerdict {
        p,
        certified: route.is_some(),
        route,
        message,
        shift_gap,
        relative_gap,
        best_shift,
        continuous_gap,
        direct_distinct,
    })
}

/// Outcome of [`minimal_period_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimalPeriodVerdict {
    /// Largest `k` with `‖z(· + T/k) − z‖_E ≤ 1e-6‖z‖`.
    pub numerical_k: usize,
    pub numerical_period: f64,
    /// `(k, ‖z(· + T/k) − z‖_E)` for `k = 2..=m`.
    pub shift_distances: Vec<(usize, f64)>,
    /// Pairs at periods `jT/k` for `j = 1..=k`, `k` the numerical divisor.
    pub pairs: Vec<IndexPair>,
    pub certificate: Option<MinimalPeriodCertificate>,
    pub certificate_note: Option<String>,
    pub h7_passed: bool,
    /// Both routes give minimal period `T`.
    pub certified_minimal: bool,
    /// (H7) held at sample scale but the routes do not certify `T`.
    pub inconsistent: bool,
}

/// Minimal period of an orbit of an autonomous model, numerically and via
/// the index certificate on the linearization at the numerical base period.
pub fn minimal_period_check(res: &SaddleResult, model: &HamiltonianModel) -> Result<MinimalPeriodVerdict> {
    if !model.autonomous() {
        return Err(Error::Inapplicable(
            "minimal-period certification needs an autonomous model".into(),
        ));
    }
    let z = &res.z;
    let n = model.half_dim();
    let tol = 1e-6 * z.norm();
    let shift_distances: Vec<(usize, f64)> = (2..=z.m())
        .map(|k| {
            let d = z.shifted(z.period() / k as f64).add_scaled(z, -1.0).expect("same space").norm();
            (k, d)
        })
        .collect();
    let numerical_k = shift_distances
        .iter()
        .filter(|(_, d)| *d <= tol)
        .map(|(k, _)| *k)
        .max()
        .unwrap_or(1);
    let base = z.contract(numerical_k);
    let lin = LinearizedPath::new(model, &base, (8 * base.m()).max(256))?;
    let mb = base.m().max(1);
    let gopts = GalerkinOptions {
        schedule: vec![mb, 2 * mb, 4 * mb],
        gap: Gap::Adaptive,
        zero_tol: 1e-7,
    };
    let pairs: Result<Vec<IndexPair>> = (1..=numerical_k).map(|j| index_pair_iterated(&lin, j, &gopts)).collect();
    let (pairs, certificate, certificate_note) = match pairs.and_then(|p| {
        let c = minimal_period_certificate(&p, n)?;
        Ok((p, c))
    }) {
        Ok((p, c)) => (p, Some(c), None),
        Err(e) => (Vec::new(), None, Some(e.to_string())),
    };
    let h7 = check_hypotheses(model, &[Hypothesis::H7], &SamplingSpec::default());
    let h7_passed = h7.get(Hypothesis::H7).is_some_and(|v| v.passed());
    let certified_minimal = numerical_k == 1 && certificate.as_ref().is_some_and(|c| c.certifies_one());
    Ok(MinimalPeriodVerdict {
        numerical_k,
        numerical_period: z.period() / numerical_k as f64,
        shift_distances,
        pairs,
        certificate,
        certificate_note,
        h7_passed,
        certified_minimal,
        inconsistent: h7_passed && !certified_minimal,
    })
}
