//! Sample-based checks of the standing hypotheses.
//!
//! Pointwise inequalities are tested on a radius ladder times a set of unit
//! directions; a violation is reported with witness points. Limit statements
//! are only tested as trends over the ladder and reported as consistent or
//! inconsistent. Nothing here is a proof.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::loopspace::{scale_point, ScalingProfile};
use crate::symplectic::DiagonalScaling;

use super::quadratic::ladder;
use super::sampling::directions;
use super::{HamiltonianModel, QuadraticTerm};

/// Relative slack for floating-point comparisons.
const SLACK: f64 = 1e-9;
/// Witnesses kept per verdict.
const MAX_WITNESSES: usize = 5;
/// (H4)/(C4): the ratio must drop by this factor over the small radii.
const DECAY_FACTOR: f64 = 1e-2;
/// (H5): the ratio must grow by this factor over the large radii.
const GROWTH_FACTOR: f64 = 10.0;
/// (H7): radius of the excluded ball around 0.
const H7_EXCLUDED: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Hypothesis {
    H1,
    H2,
    H3,
    H3Prime,
    H4,
    H5,
    H7,
    C1,
    C2,
    C3,
    C4,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 11] = [
        Self::H1,
        Self::H2,
        Self::H3,
        Self::H3Prime,
        Self::H4,
        Self::H5,
        Self::H7,
        Self::C1,
        Self::C2,
        Self::C3,
        Self::C4,
    ];

    /// The hypotheses assumed for the example: (H1) through (H5).
    pub const BASIC: [Hypothesis; 5] = [Self::H1, Self::H2, Self::H3, Self::H4, Self::H5];

    pub fn is_limit(self) -> bool {
        matches!(self, Self::H4 | Self::H5 | Self::C4)
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::H1 => "H1",
            Self::H2 => "H2",
            Self::H3 => "H3",
            Self::H3Prime => "H3'",
            Self::H4 => "H4",
            Self::H5 => "H5",
            Self::H7 => "H7",
            Self::C1 => "C1",
            Self::C2 => "C2",
            Self::C3 => "C3",
            Self::C4 => "C4",
        };
        f.write_str(s)
    }
}

/// Radii and direction count for the checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingSpec {
    pub radii: Vec<f64>,
    pub directions: usize,
}

impl Default for SamplingSpec {
    /// The ladder `10^j`, `j = −4..4`, with 64 directions per radius.
    fn default() -> Self {
        Self {
            radii: ladder(),
            directions: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictStatus {
    Holds,
    Violated,
    Consistent,
    Inconsistent,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub t: f64,
    pub z: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub hypothesis: Hypothesis,
    pub status: VerdictStatus,
    pub witnesses: Vec<Witness>,
    /// `(radius, ratio)` pairs for trend checks.
    pub trend: Vec<(f64, f64)>,
    pub note: String,
}

impl Verdict {
    /// `Holds` or `Consistent`.
    pub fn passed(&self) -> bool {
        matches!(self.status, VerdictStatus::Holds | VerdictStatus::Consistent)
    }

    fn skipped(h: Hypothesis, note: &str) -> Self {
        Self {
            hypothesis: h,
            status: VerdictStatus::Skipped,
            witnesses: vec![],
            trend: vec![],
            note: note.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub verdicts: Vec<Verdict>,
}

impl HypothesisReport {
    pub fn get(&self, h: Hypothesis) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.hypothesis == h)
    }

    /// True when every requested hypothesis passed; skipped ones count as failures.
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(Verdict::passed)
    }
}

struct Sample {
    t: f64,
    r: f64,
    z: Vec<f64>,
}

fn samples(model: &HamiltonianModel, radii: &[f64], count: usize, skip_axes: bool) -> Vec<Sample> {
    let dim = 2 * model.half_dim();
    let dirs = directions(dim, count + if skip_axes { 2 * dim } else { 0 }, model.period());
    let dirs = if skip_axes { &dirs[2 * dim..] } else { &dirs[..] };
    radii
        .iter()
        .flat_map(|&r| {
            dirs.iter().map(move |(t, d)| Sample {
                t: *t,
                r,
                z: d.iter().map(|x| x * r).collect(),
            })
        })
        .collect()
}

/// Checks `lhs ≥ rhs` at every sample, with relative slack.
fn pointwise(
    h: Hypothesis,
    samples: &[Sample],
    note: impl Into<String>,
    f: impl Fn(&Sample) -> (f64, f64) + Sync,
) -> Verdict {
    let mut witnesses: Vec<Witness> = samples
        .par_iter()
        .filter_map(|s| {
            let (lhs, rhs) = f(s);
            let ok = lhs >= rhs - SLACK * (1.0 + lhs.abs().max(rhs.abs()));
            (!ok).then(|| Witness {
                t: s.t,
                z: s.z.clone(),
                lhs,
                rhs,
            })
        })
        .collect();
    let status = if witnesses.is_empty() {
        VerdictStatus::Holds
    } else {
        VerdictStatus::Violated
    };
    witnesses.truncate(MAX_WITNESSES);
    Verdict {
        hypothesis: h,
        status,
        witnesses,
        trend: vec![],
        note: note.into(),
    }
}

/// Per-radius extreme of `ratio`, ordered as `radii`.
fn trend(samples: &[Sample], radii: &[f64], take_max: bool, ratio: impl Fn(&Sample) -> f64 + Sync) -> Vec<(f64, f64)> {
    radii
        .iter()
        .map(|&r| {
            let vals = samples.par_iter().filter(|s| s.r == r).map(&ratio);
            let v = if take_max {
                vals.reduce(|| f64::NEG_INFINITY, f64::max)
            } else {
                vals.reduce(|| f64::INFINITY, f64::min)
            };
            (r, v)
        })
        .collect()
}

/// Trend towards 0 over the radii `≤ 1`, visited from large to small.
fn decay_verdict(h: Hypothesis, t: Vec<(f64, f64)>, note: &str) -> Verdict {
    if t.len() < 2 {
        return Verdict::skipped(h, "fewer than two radii ≤ 1");
    }
    let monotone = t.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-6) + 1e-300);
    let first = t[0].1;
    let last = t[t.len() - 1].1;
    let ok = monotone && last.is_finite() && last <= DECAY_FACTOR * first;
    Verdict {
        hypothesis: h,
        status: if ok {
            VerdictStatus::Consistent
        } else {
            VerdictStatus::Inconsistent
        },
        witnesses: vec![],
        trend: t,
        note: note.into(),
    }
}

fn sym_norm(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .fold(0.0, |a: f64, x| a.max(x.abs()))
}

fn dot(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.dot(b)
}

/// Runs the requested checks. Hypotheses needing growth data the model does
/// not carry are reported as skipped.
pub fn check_hypotheses(model: &HamiltonianModel, which: &[Hypothesis], spec: &SamplingSpec) -> HypothesisReport {
    let all = samples(model, &spec.radii, spec.directions, false);
    let mut small: Vec<f64> = spec.radii.iter().copied().filter(|&r| r <= 1.0).collect();
    small.sort_by(|a, b| b.total_cmp(a));
    let mut large: Vec<f64> = spec.radii.iter().copied().filter(|&r| r >= 1.0).collect();
    large.sort_by(|a, b| a.total_cmp(b));
    let g = model.growth();
    let period = model.period();

    let verdicts = which
        .iter()
        .map(|&h| match h {
            Hypothesis::H1 | Hypothesis::C1 => {
                let mut v = pointwise(h, &all, "H ≥ 0 and τ-periodic", |s| (model.value(s.t, &s.z), 0.0));
                let per = pointwise(h, &all, "", |s| {
                    let v = model.value(s.t, &s.z);
                    (1e-10 * (1.0 + v.abs()), (v - model.value(s.t + period, &s.z)).abs())
                });
                if per.status == VerdictStatus::Violated {
                    v.status = VerdictStatus::Violated;
                    v.note.push_str("; periodicity fails");
                    v.witnesses.extend(per.witnesses);
                    v.witnesses.truncate(MAX_WITNESSES);
                }
                v
            }
            Hypothesis::H2 => match g {
                None => Verdict::skipped(h, "no growth data"),
                Some(g) => {
                    let v1 = g.v1();
                    pointwise(h, &all, "H′·V₁ − H ≥ c₁|z|^β − c₂", |s| {
                        let grad = model.gradient(s.t, &s.z);
                        let vz = v1.apply(&s.z).expect("dimension");
                        (
                            dot(&grad, &vz) - model.value(s.t, &s.z),
                            g.c1 * s.r.powf(g.beta) - g.c2,
                        )
                    })
                }
            },
            Hypothesis::H3 => match g {
                None => Verdict::skipped(h, "no growth data"),
                Some(g) => {
                    let (lo, hi) = g.lambda_range();
                    let mut v = pointwise(h, &all, "|H″| ≤ c₂(|z|^{λ−1} + 1)", |s| {
                        (
                            g.c2 * (s.r.powf(g.lambda - 1.0) + 1.0),
                            sym_norm(&model.hessian(s.t, &s.z)),
                        )
                    });
                    if !(g.lambda > lo && g.lambda < hi) {
                        v.status = VerdictStatus::Violated;
                        v.note = format!("λ = {} outside Λ = ({lo}, {hi})", g.lambda);
                    }
                    v
                }
            },
            Hypothesis::H3Prime => match g.and_then(|g| Some((g, g.v2()?))) {
                None => Verdict::skipped(h, "no V₂ weights"),
                Some((g, v2)) => pointwise(h, &all, "H′·V₂ − H ≥ c₁|H′| − c₂", |s| {
                    let grad = model.gradient(s.t, &s.z);
                    let vz = v2.apply(&s.z).expect("dimension");
                    (
                        dot(&grad, &vz) - model.value(s.t, &s.z),
                        g.c1 * grad.norm() - g.c2,
                    )
                }),
            },
            Hypothesis::H4 => match g {
                None => Verdict::skipped(h, "no growth data"),
                Some(g) => {
                    let t = trend(&all, &small, true, |s| model.value(s.t, &s.z) / g.w(&s.z));
                    decay_verdict(h, t, "max H/w(z) over each radius ≤ 1 decreases towards 0")
                }
            },
            Hypothesis::H5 => match g {
                None => Verdict::skipped(h, "no growth data"),
                Some(g) => {
                    let t = trend(&all, &large, false, |s| model.value(s.t, &s.z) / g.w(&s.z));
                    if t.len() < 2 {
                        Verdict::skipped(h, "fewer than two radii ≥ 1")
                    } else {
                        let monotone = t.windows(2).all(|w| w[1].1 >= w[0].1 * (1.0 - 1e-2));
                        let ok = monotone && t[t.len() - 1].1 >= GROWTH_FACTOR * t[0].1.max(1e-300);
                        Verdict {
                            hypothesis: h,
                            status: if ok {
                                VerdictStatus::Consistent
                            } else {
                                VerdictStatus::Inconsistent
                            },
                            witnesses: vec![],
                            trend: t,
                            note: "min H/w(z) over each radius ≥ 1 grows".into(),
                        }
                    }
                }
            },
            Hypothesis::H7 => {
                let radii: Vec<f64> = spec.radii.iter().copied().filter(|&r| r >= H7_EXCLUDED).collect();
                let pts = samples(model, &radii, spec.directions, true);
                let mut v = pointwise(
                    h,
                    &pts,
                    "smallest eigenvalue of H″ positive on sphere samples (sample scale only; coordinate axes not sampled)",
                    |s| {
                        let e = SymmetricEigen::new(model.hessian(s.t, &s.z)).eigenvalues;
                        (e.min(), 0.0)
                    },
                );
                // Strict positivity: zero counts as a violation.
                if v.status == VerdictStatus::Holds {
                    let zero = pts.iter().find(|s| {
                        SymmetricEigen::new(model.hessian(s.t, &s.z)).eigenvalues.min() <= 0.0
                    });
                    if let Some(s) = zero {
                        v.status = VerdictStatus::Violated;
                        v.witnesses.push(Witness {
                            t: s.t,
                            z: s.z.clone(),
                            lhs: 0.0,
                            rhs: 0.0,
                        });
                    }
                }
                v
            }
            Hypothesis::C2 => match g.and_then(|g| Some((g, g.v3()?, g.theta?, g.r0?))) {
                None => Verdict::skipped(h, "no (φ, ψ, θ, R) data"),
                Some((_, v3, theta, r0)) => {
                    let pts: Vec<Sample> = samples(model, &spec.radii, spec.directions, false)
                        .into_iter()
                        .filter(|s| s.r >= r0)
                        .collect();
                    let mut v = pointwise(h, &pts, "θH′·V₃ ≥ H > 0 for |z| ≥ R", |s| {
                        let grad = model.gradient(s.t, &s.z);
                        let vz = v3.apply(&s.z).expect("dimension");
                        (theta * dot(&grad, &vz), model.value(s.t, &s.z))
                    });
                    if pts.iter().any(|s| model.value(s.t, &s.z) <= 0.0) {
                        v.status = VerdictStatus::Violated;
                        v.note.push_str("; H vanishes outside the ball");
                    }
                    v
                }
            },
            Hypothesis::C3 => match g.and_then(|g| Some((g.v3()?, g.b1?, g.b2?))) {
                None => Verdict::skipped(h, "no (φ, ψ, b₁, b₂) data"),
                Some((v3, b1, b2)) => pointwise(h, &all, "|H′| ≤ b₁H′·V₃ + b₂", |s| {
                    let grad = model.gradient(s.t, &s.z);
                    let vz = v3.apply(&s.z).expect("dimension");
                    (b1 * dot(&grad, &vz) + b2, grad.norm())
                }),
            },
            Hypothesis::C4 => match g.and_then(|g| Some((g.phi.clone()?, g.psi.clone()?))) {
                None => Verdict::skipped(h, "no (φ, ψ) data"),
                Some((phi, psi)) => {
                    let n = model.half_dim();
                    let denom = move |z: &[f64]| -> f64 {
                        (0..n)
                            .map(|i| z[i].abs().powf(phi[i]) + z[n + i].abs().powf(psi[i]))
                            .sum()
                    };
                    let t = trend(&all, &small, true, |s| model.value(s.t, &s.z) / denom(&s.z));
                    decay_verdict(h, t, "max H/Σ(|p|^φ + |q|^ψ) decreases towards 0")
                }
            },
        })
        .collect();
    HypothesisReport { verdicts }
}

/// Result of [`check_h6`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct H6Report {
    /// `b_ij ≡ 0` whenever `|i − j| ≠ n`, on the sampled times.
    pub structural: bool,
    /// Largest relative defect of `(B̂z,z) = 2(B̂z, Vz)`.
    pub bilinear_error: f64,
    /// Largest relative defect of `(B̂B_ϱz, B_ϱz) = ϱ^{η−2}(B̂z,z)` per `ϱ`.
    pub scaling_errors: Vec<(f64, f64)>,
    pub holds: bool,
}

const H6_TOL: f64 = 1e-10;

fn time_samples(period: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| period * j as f64 / count as f64).collect()
}

fn check_dims(bhat: &QuadraticTerm, v: &DiagonalScaling, profile: &ScalingProfile) -> Result<usize> {
    let n = bhat.half_dim();
    if v.half_dim() != n || profile.half_dim() != n {
        return Err(Error::Dimension(format!(
            "B̂ has n = {n}, V has {}, profile has {}",
            v.half_dim(),
            profile.half_dim()
        )));
    }
    Ok(n)
}

/// Checks the two identities of (H6) on sampled `(t, z)` and the sparsity test.
pub fn check_h6(
    bhat: &QuadraticTerm,
    v: &DiagonalScaling,
    profile: &ScalingProfile,
    rhos: &[f64],
) -> Result<H6Report> {
    let n = check_dims(bhat, v, profile)?;
    let times = time_samples(bhat.period(), 32);
    let dirs = directions(2 * n, 64, 1.0);
    let scale = bhat.omega().max(f64::MIN_POSITIVE);
    let mats: Vec<DMatrix<f64>> = times.iter().map(|&t| bhat.eval(t)).collect();
    let structural = mats.iter().all(|b| {
        (0..2 * n).all(|i| (0..2 * n).all(|j| i.abs_diff(j) == n || b[(i, j)] == 0.0))
    });
    let mut bilinear_error: f64 = 0.0;
    for b in &mats {
        for (_, d) in &dirs {
            let z = DVector::from_column_slice(d);
            let bz = b * &z;
            let vz = v.apply(d)?;
            bilinear_error = bilinear_error.max((bz.dot(&z) - 2.0 * bz.dot(&vz)).abs() / scale);
        }
    }
    let eta = profile.eta();
    let mut scaling_errors = Vec::with_capacity(rhos.len());
    for &rho in rhos {
        let mut err: f64 = 0.0;
        for b in &mats {
            for (_, d) in &dirs {
                let z = DVector::from_column_slice(d);
                let zr = scale_point(d, rho, profile)?;
                let lhs = (b * &zr).dot(&zr);
                let rhs = rho.powf(eta - 2.0) * (b * &z).dot(&z);
                let denom = scale * (zr.norm_squared() + rho.powf(eta - 2.0));
                err = err.max((lhs - rhs).abs() / denom);
            }
        }
        scaling_errors.push((rho, err));
    }
    let holds = bilinear_error <= H6_TOL && scaling_errors.iter().all(|&(_, e)| e <= H6_TOL);
    Ok(H6Report {
        structural,
        bilinear_error,
        scaling_errors,
        holds,
    })
}

/// Result of [`check_h6_prime`] and [`check_c5_prime`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticBoundReport {
    /// `max_t |B̂ − B̂V − VB̂|`.
    pub defect: f64,
    pub threshold: f64,
    /// `max (B̂B_ϱz, B_ϱz)/ϱ^{η−2}` over `|z| = 1` for each `ϱ < 1`, largest `ϱ` first.
    pub small_rho: Vec<(f64, f64)>,
    /// `min (B̂B_ϱz, B_ϱz)/ϱ^{η−2}` over `|z| = 1` for each `ϱ > 1`.
    pub large_rho: Vec<(f64, f64)>,
    /// Estimate of `ω₁` (resp. `ω₃`).
    pub omega_upper: f64,
    /// Estimate of `ω₂` (resp. `ω₄`).
    pub omega_lower: f64,
    pub holds: bool,
}

fn quadratic_bound(
    bhat: &QuadraticTerm,
    v: &DiagonalScaling,
    profile: &ScalingProfile,
    threshold: f64,
    rhos: &[f64],
) -> Result<QuadraticBoundReport> {
    let n = check_dims(bhat, v, profile)?;
    let times = time_samples(bhat.period(), 64);
    let vm = v.matrix();
    let mats: Vec<DMatrix<f64>> = times.iter().map(|&t| bhat.eval(t)).collect();
    let defect = mats
        .iter()
        .map(|b| sym_norm(&(b - b * &vm - &vm * b)))
        .fold(0.0, f64::max);
    let dirs = directions(2 * n, 64, 1.0);
    let eta = profile.eta();
    let ratio = |rho: f64, take_max: bool| -> Result<f64> {
        let mut best = if take_max { f64::NEG_INFINITY } else { f64::INFINITY };
        for b in &mats {
            for (_, d) in &dirs {
                let zr = scale_point(d, rho, profile)?;
                let r = (b * &zr).dot(&zr) / rho.powf(eta - 2.0);
                best = if take_max { best.max(r) } else { best.min(r) };
            }
        }
        Ok(best)
    };
    let mut small: Vec<f64> = rhos.iter().copied().filter(|&r| r < 1.0).collect();
    small.sort_by(|a, b| b.total_cmp(a));
    let mut large: Vec<f64> = rhos.iter().copied().filter(|&r| r > 1.0).collect();
    large.sort_by(|a, b| a.total_cmp(b));
    let small_rho = small
        .iter()
        .map(|&r| Ok((r, ratio(r, true)?)))
        .collect::<Result<Vec<_>>>()?;
    let large_rho = large
        .iter()
        .map(|&r| Ok((r, ratio(r, false)?)))
        .collect::<Result<Vec<_>>>()?;
    let omega_upper = small_rho.iter().map(|x| x.1).fold(0.0, f64::max);
    let omega_lower = large_rho.last().map_or(0.0, |x| x.1.max(0.0));
    // Bounded above as ϱ → 0: the last value does not exceed 10× the first.
    let upper_ok = match (small_rho.first(), small_rho.last()) {
        (Some(a), Some(b)) => b.1.is_finite() && b.1 <= 10.0 * a.1.abs().max(bhat.omega()) + 1e-12,
        _ => false,
    };
    let lower_ok = large_rho
        .last()
        .is_some_and(|x| x.1 >= -1e-10 * bhat.omega().max(1.0));
    Ok(QuadraticBoundReport {
        defect,
        threshold,
        small_rho,
        large_rho,
        omega_upper,
        omega_lower,
        holds: defect < threshold && upper_ok && lower_ok,
    })
}

/// `c_s` with `‖z‖_{L^s} ≥ c_s‖z‖_{L²}` on `[0, τ]`, which exists for `s ≥ 2`.
pub(crate) fn lp_constant(s: f64, period: f64) -> Option<f64> {
    (s >= 2.0).then(|| period.powf(1.0 / s - 0.5))
}

/// (H6)′ with `V = V₁`, threshold `c₁c_β` and the scaling profile of the model.
pub fn check_h6_prime(
    bhat: &QuadraticTerm,
    model: &HamiltonianModel,
    profile: &ScalingProfile,
    rhos: &[f64],
) -> Result<QuadraticBoundReport> {
    let g = model
        .growth()
        .ok_or_else(|| Error::InvalidInput("(H6)′ needs growth data".into()))?;
    let c_beta = lp_constant(g.beta, bhat.period())
        .ok_or_else(|| Error::Hypothesis(format!("(H6)′ requires β ≥ 2, got β = {}", g.beta)))?;
    quadratic_bound(bhat, &g.v1(), profile, g.c1 * c_beta, rhos)
}

/// (C5)′ with `V = V₃`, threshold `c₁ min_i{c_{φ_i}, c_{ψ_i}}` and the profile
/// built from `η̂ = max_i(φ_i + ψ_i)`.
pub fn check_c5_prime(bhat: &QuadraticTerm, model: &HamiltonianModel, rhos: &[f64]) -> Result<QuadraticBoundReport> {
    let g = model
        .growth()
        .ok_or_else(|| Error::InvalidInput("(C5)′ needs growth data".into()))?;
    let (phi, psi) = match (&g.phi, &g.psi) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => return Err(Error::InvalidInput("(C5)′ needs φ and ψ".into())),
    };
    let v3 = g.v3().expect("φ, ψ present");
    let eta_hat = phi.iter().zip(&psi).map(|(a, b)| a + b).fold(0.0, f64::max);
    let profile = ScalingProfile::new(phi.clone(), psi.clone(), eta_hat)?;
    let mut c = f64::INFINITY;
    for &s in phi.iter().chain(&psi) {
        c = c.min(lp_constant(s, bhat.period()).ok_or_else(|| {
            Error::Hypothesis(format!("(C5)′ requires φ_i, ψ_i ≥ 2, got {s}"))
        })?);
    }
    quadratic_bound(bhat, &v3, &profile, g.c1 * c, rhos)
}
