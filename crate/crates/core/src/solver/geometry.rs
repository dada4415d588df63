//! The linking sets `S = {z ∈ E⁺ : ‖z‖ = μ}` and
//! `Q = (B̄_ν ∩ (E⁻⊕E⁰)) ⊕ [0,ν]e`, their images under `B_μ`, `B_ν`, and the
//! constants that fix `μ`, `ν`, `δ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonians::HamiltonianModel;
use crate::loopspace::{scale_loop, FourierLoop, Grid, Part, ScalingProfile};

use super::functional::ActionFunctional;

/// `μ`, `ν`, `δ = (π/3T)μ^η`, the direction `e` and the scaling profile.
#[derive(Clone, Debug, Serialize)]
pub struct LinkingGeometry {
    pub mu: f64,
    pub nu: f64,
    pub delta: f64,
    #[serde(skip)]
    pub e: FourierLoop,
    pub profile: ScalingProfile,
}

/// The unit loop `e(t) = (cos ωt, sin ωt)/√T` in the first conjugate plane.
pub fn standard_e(n: usize, m: usize, period: f64) -> FourierLoop {
    let mut e = FourierLoop::zeros(n, m.max(1), period);
    e.coeff_mut(1)[0] = 1.0 / period.sqrt();
    e
}

impl LinkingGeometry {
    /// Requires `0 < μ < 1`, `ν > μ` and a unit `e ∈ E₁ ∩ E⁺`.
    pub fn new(mu: f64, nu: f64, e: FourierLoop, profile: ScalingProfile) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::InvalidInput(format!("μ = {mu} must lie in (0, 1)")));
        }
        if !(nu > mu) || !nu.is_finite() {
            return Err(Error::InvalidInput(format!("ν = {nu} must exceed μ = {mu}")));
        }
        if profile.half_dim() != e.half_dim() {
            return Err(Error::Dimension("profile and e differ in n".into()));
        }
        let stray = e.add_scaled(&e.project(Part::Plus), -1.0)?.norm()
            + e.modes().filter(|(k, _)| *k > 1).map(|(_, a)| a.iter().map(|x| x.abs()).sum::<f64>()).sum::<f64>();
        if (e.norm() - 1.0).abs() > 1e-12 || stray > 1e-12 {
            return Err(Error::InvalidInput("e must be a unit vector of E₁ ∩ E⁺".into()));
        }
        let delta = std::f64::consts::PI / (3.0 * e.period()) * mu.powf(profile.eta());
        Ok(Self {
            mu,
            nu,
            delta,
            e,
            profile,
        })
    }

    pub fn period(&self) -> f64 {
        self.e.period()
    }

    /// `(2π/T)ν^η`, the upper bound of `f` on `B_ν(Q)`.
    pub fn upper_level(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.period() * self.nu.powf(self.profile.eta())
    }

    /// `[δ − sδ, (2π/T)ν^η + sδ]` for slack fraction `s`.
    pub fn value_window(&self, slack: f64) -> (f64, f64) {
        (self.delta * (1.0 - slack), self.upper_level() + slack * self.delta)
    }

    fn e_in(&self, m: usize) -> FourierLoop {
        self.e.with_truncation(m)
    }

    /// Points of `B_μ(S_m)`. The first one is `B_μ(μe)`.
    pub fn sample_sphere(&self, m: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<FourierLoop> {
        let mut out = Vec::with_capacity(count);
        for j in 0..count {
            let u = if j == 0 { self.e_in(m) } else { random_part(self.e.half_dim(), m, self.period(), Part::Plus, rng) };
            let z = u.scale(self.mu / u.norm());
            out.push(scale_loop(&z, self.mu, &self.profile).expect("profile matches"));
        }
        out
    }

    /// Points `B_ν(se + y)` of `B_ν(∂Q_m)`, cycling through the faces
    /// `s = 0`, `s = ν` and `‖y‖ = ν`.
    pub fn sample_boundary(&self, m: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<FourierLoop> {
        let e = self.e_in(m);
        (0..count)
            .map(|j| {
                let y = random_lower(self.e.half_dim(), m, self.period(), rng);
                let (s, r) = match j % 3 {
                    0 => (0.0, self.nu * rng.random::<f64>()),
                    1 => (self.nu, self.nu * rng.random::<f64>()),
                    _ => (self.nu * rng.random::<f64>(), self.nu),
                };
                let z = y.scale(r / y.norm()).add_scaled(&e, s).expect("same space");
                scale_loop(&z, self.nu, &self.profile).expect("profile matches")
            })
            .collect()
    }

    /// Points `B_ν(se + y)` of `B_ν(Q_m)`.
    pub fn sample_q(&self, m: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<FourierLoop> {
        let e = self.e_in(m);
        (0..count)
            .map(|_| {
                let y = random_lower(self.e.half_dim(), m, self.period(), rng);
                let r = self.nu * rng.random::<f64>();
                let s = self.nu * rng.random::<f64>();
                let z = y.scale(r / y.norm()).add_scaled(&e, s).expect("same space");
                scale_loop(&z, self.nu, &self.profile).expect("profile matches")
            })
            .collect()
    }

    /// Sampled shadows of `inf_{B_μ(S)} f ≥ δ`, `f|_{B_ν(∂Q)} ≤ 0` and
    /// `f|_{B_ν(Q)} ≤ (2π/T)ν^η`.
    pub fn level_diagnostics(&self, f: &ActionFunctional, samples: usize, seed: u64) -> Result<LevelDiagnostics> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = f.m();
        let eval = |zs: Vec<FourierLoop>| -> Result<Vec<f64>> { zs.iter().map(|z| f.value(z)).collect() };
        let on_s = eval(self.sample_sphere(m, samples, &mut rng))?;
        let on_dq = eval(self.sample_boundary(m, samples, &mut rng))?;
        let on_q = eval(self.sample_q(m, samples, &mut rng))?;
        let min_on_s = on_s.iter().copied().fold(f64::INFINITY, f64::min);
        let max_on_dq = on_dq.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let max_on_q = on_q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(LevelDiagnostics {
            samples,
            min_on_s,
            max_on_dq,
            max_on_q,
            delta: self.delta,
            upper: self.upper_level(),
            s_ok: min_on_s >= self.delta,
            dq_ok: max_on_dq <= 0.0,
            q_ok: max_on_q <= self.upper_level(),
        })
    }
}

/// Outcome of [`LinkingGeometry::level_diagnostics`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelDiagnostics {
    pub samples: usize,
    pub min_on_s: f64,
    pub max_on_dq: f64,
    pub max_on_q: f64,
    pub delta: f64,
    pub upper: f64,
    pub s_ok: bool,
    pub dq_ok: bool,
    pub q_ok: bool,
}

impl LevelDiagnostics {
    pub fn ok(&self) -> bool {
        self.s_ok && self.dq_ok && self.q_ok
    }
}

/// A random loop supported on one part, with coefficients decaying like `1/|k|`.
fn random_part(n: usize, m: usize, period: f64, part: Part, rng: &mut ChaCha8Rng) -> FourierLoop {
    loop {
        let mut z = FourierLoop::zeros(n, m, period);
        for k in -(m as i64)..=m as i64 {
            let keep = match part {
                Part::Plus => k > 0,
                Part::Minus => k < 0,
                Part::Zero => k == 0,
            };
            if keep {
                let f = 1.0 / k.unsigned_abs().max(1) as f64;
                z.coeff_mut(k).iter_mut().for_each(|x| *x = f * rng.sample::<f64, _>(StandardNormal));
            }
        }
        if z.norm() > 1e-12 {
            return z;
        }
    }
}

/// A random loop in `E⁻ ⊕ E⁰` with a random split between the two parts.
fn random_lower(n: usize, m: usize, period: f64, rng: &mut ChaCha8Rng) -> FourierLoop {
    let minus = random_part(n, m, period, Part::Minus, rng);
    let zero = random_part(n, m, period, Part::Zero, rng);
    let c: f64 = rng.random();
    minus
        .scale(c / minus.norm())
        .add_scaled(&zero, (1.0 - c) / zero.norm())
        .expect("same space")
}

/// `sup{ε : meas{t : |z(t)| ≥ ε} ≥ ε}` on a uniform grid.
pub fn measure_level(z: &FourierLoop, grid: &Grid) -> f64 {
    let mut v: Vec<f64> = grid.synthesize(z).iter().map(|x| x.norm()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    let h = grid.weight();
    v.iter()
        .enumerate()
        .map(|(j, &x)| x.min((j + 1) as f64 * h))
        .fold(0.0, f64::max)
}

/// Empirical stand-in for the measure constant `ε₁`: half the smallest
/// [`measure_level`] over samples of
/// `W = {z ∈ span{e} ⊕ E⁻ ⊕ E⁰ : 1 ≤ ‖z‖ ≤ 2, ‖z⁻‖ ≤ ‖z⁺ + z⁰‖}`.
pub fn epsilon1_surrogate(n: usize, m: usize, period: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = Grid::new((8 * m).max(256), period);
    let e = standard_e(n, m, period);
    let mut worst = f64::INFINITY;
    for j in 0..samples.max(3) {
        let z = match j {
            0 => e.clone(),
            1 => random_part(n, m, period, Part::Zero, &mut rng),
            2 => {
                // e plus its mirror mode, which cancels one component.
                let mut z = e.clone();
                z.coeff_mut(-1)[0] = 1.0 / period.sqrt();
                z
            }
            _ => {
                let s: f64 = rng.random();
                let zero = random_part(n, m, period, Part::Zero, &mut rng);
                let c: f64 = rng.random();
                let upper = e.scale(s).add_scaled(&zero, c / zero.norm()).expect("same space");
                let minus = random_part(n, m, period, Part::Minus, &mut rng);
                let r: f64 = rng.random();
                let z = upper.add_scaled(&minus, r * upper.norm() / minus.norm()).expect("same space");
                if z.norm() < 1e-12 {
                    continue;
                }
                z
            }
        };
        let target = 1.0 + rng.random::<f64>();
        worst = worst.min(measure_level(&z.scale(target / z.norm()), &grid));
    }
    0.5 * worst
}

/// `A₁ = (2π/T)√(2n) / (ε₁ min_i{(ε₁/√(2n))^{1+σ_i/τ_i}, (ε₁/√(2n))^{1+τ_i/σ_i}})`.
pub fn a1_constant(eps1: f64, profile: &ScalingProfile, period: f64) -> f64 {
    let n = profile.half_dim() as f64;
    let r = eps1 / (2.0 * n).sqrt();
    let min = profile
        .sigma()
        .iter()
        .zip(profile.tau_exp())
        .flat_map(|(s, t)| [r.powf(1.0 + s / t), r.powf(1.0 + t / s)])
        .fold(f64::INFINITY, f64::min);
    2.0 * std::f64::consts::PI / period * (2.0 * n).sqrt() / (eps1 * min)
}

/// The smallest radius `A₂` on a log grid up to `10⁶` beyond which
/// `H(t,z) ≥ A₁ w(z)` at every sampled direction and time.
pub fn a2_constant(model: &HamiltonianModel, a1: f64) -> Result<f64> {
    let growth = model
        .growth()
        .ok_or_else(|| Error::InvalidInput("A₂ needs growth data".into()))?;
    let dirs = crate::hamiltonians::sampling_directions(2 * model.half_dim(), 64, model.period());
    let radii: Vec<f64> = (0..=320).map(|i| 10f64.powf(-2.0 + i as f64 / 40.0)).collect();
    let mut last_bad: Option<usize> = None;
    for (i, &r) in radii.iter().enumerate() {
        let bad = dirs.iter().any(|(t, d)| {
            let z: Vec<f64> = d.iter().map(|x| x * r).collect();
            model.value(*t, &z) < a1 * growth.w(&z)
        });
        if bad {
            last_bad = Some(i);
        }
    }
    match last_bad {
        None => Ok(radii[0]),
        Some(i) if i + 1 < radii.len() => Ok(radii[i + 1]),
        Some(_) => Err(Error::Hypothesis(format!(
            "H ≥ A₁w(z) fails up to |z| = {:.1e} with A₁ = {a1:.3e}; use a cut-off model",
            radii[radii.len() - 1]
        ))),
    }
}

/// The largest `μ = 0.9·2^{−j}` with `f(B_μ z) ≥ 1.5δ(μ)` on sampled
/// `z ∈ S_m`; the margin keeps fresh samples above `δ`.
pub fn select_mu(f: &ActionFunctional, profile: &ScalingProfile, samples: usize, seed: u64) -> Result<f64> {
    let (n, m, period) = (f.half_dim(), f.m(), f.period());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs = vec![standard_e(n, m, period)];
    while dirs.len() < samples.max(1) {
        dirs.push(random_part(n, m, period, Part::Plus, &mut rng));
    }
    for j in 0..40 {
        let mu = 0.9 * 0.5f64.powi(j);
        let delta = std::f64::consts::PI / (3.0 * period) * mu.powf(profile.eta());
        let mut ok = true;
        for u in &dirs {
            let z = scale_loop(&u.scale(mu / u.norm()), mu, profile)?;
            if f.value(&z)? < 1.5 * delta {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(mu);
        }
    }
    Err(Error::Hypothesis("no admissible μ ≥ 0.9·2⁻³⁹ found".into()))
}

/// The constants behind a constructed geometry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometryConstants {
    pub eps1: f64,
    pub a1: f64,
    pub a2: f64,
}

/// `μ` by [`select_mu`], `ν = A₂/ε̂₁ + 1` and `e` = [`standard_e`] for the
/// functional's model, which should already be the cut-off model.
pub fn construct_geometry(
    f: &ActionFunctional,
    eps1: f64,
    a1: f64,
    samples: usize,
    seed: u64,
) -> Result<(LinkingGeometry, GeometryConstants)> {
    let growth = f
        .model()
        .growth()
        .ok_or_else(|| Error::InvalidInput("the linking geometry needs growth data".into()))?;
    let profile = ScalingProfile::minimal(growth.sigma.clone(), growth.tau_exp.clone())?;
    let a2 = a2_constant(f.model(), a1)?;
    let nu = a2 / eps1 + 1.0;
    let mu = select_mu(f, &profile, samples, seed)?;
    let g = LinkingGeometry::new(mu, nu, standard_e(f.half_dim(), f.m(), f.period()), profile)?;
    Ok((g, GeometryConstants { eps1, a1, a2 }))
}

/// Where a seed was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SeedKind {
    /// `B_ν(se)` with `μ < s < ν`.
    Segment,
    /// `B_μ(S_m)`.
    Sphere,
    /// `B_ν(∂Q_m)`.
    Boundary,
}

#[derive(Clone, Debug)]
pub struct LinkingSeed {
    pub kind: SeedKind,
    pub z: FourierLoop,
}

/// `count` starts in `E_m`: half on the segment (geometric in `s`), a quarter
/// on `B_μ(S_m)` and the rest on `B_ν(∂Q_m)`, in that order.
pub fn linking_seed_set(g: &LinkingGeometry, m: usize, count: usize, seed: u64) -> Vec<LinkingSeed> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_seg = count.div_ceil(2);
    let n_s = (count - n_seg).div_ceil(2);
    let n_q = count - n_seg - n_s;
    let e = g.e.with_truncation(m);
    let mut out: Vec<LinkingSeed> = (0..n_seg)
        .map(|j| {
            let s = g.mu * (g.nu / g.mu).powf((j + 1) as f64 / (n_seg + 1) as f64);
            LinkingSeed {
                kind: SeedKind::Segment,
                z: scale_loop(&e.scale(s), g.nu, &g.profile).expect("profile matches"),
            }
        })
        .collect();
    out.extend(g.sample_sphere(m, n_s, &mut rng).into_iter().map(|z| LinkingSeed { kind: SeedKind::Sphere, z }));
    out.extend(g.sample_boundary(m, n_q, &mut rng).into_iter().map(|z| LinkingSeed { kind: SeedKind::Boundary, z }));
    out
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::example_anisotropic;
    use std::f64::consts::TAU;

    #[test]
    fn rejects_bad_radii() {
        let p = ScalingProfile::minimal(vec![1.0], vec![1.0]).unwrap();
        let e = standard_e(1, 4, TAU);
        assert!(LinkingGeometry::new(0.5, 0.5, e.clone(), p.clone()).is_err());
        assert!(LinkingGeometry::new(0.5, 0.2, e.clone(), p.clone()).is_err());
        assert!(LinkingGeometry::new(1.5, 3.0, e.clone(), p.clone()).is_err());
        assert!(LinkingGeometry::new(0.5, 3.0, e.scale(2.0), p.clone()).is_err());
        let g = LinkingGeometry::new(0.5, 3.0, e, p).unwrap();
        assert!((g.delta - std::f64::consts::PI / (3.0 * TAU) * 0.25).abs() < 1e-15);
    }

    #[test]
    fn measure_level_of_constant() {
        let z = FourierLoop::constant(&[0.3, 0.4], 2, 2.0).unwrap();
        let grid = Grid::new(64, 2.0);
        assert!((measure_level(&z, &grid) - 0.5).abs() < 1e-12);
        let big = z.scale(10.0);
        assert!((measure_level(&big, &grid) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn a1_reference() {
        let p = ScalingProfile::minimal(vec![1.0], vec![1.0]).unwrap();
        // n = 1, exponents 2: A₁ = √2 · 2 / (ε · ε²) at T = 2π.
        let eps = 0.1;
        let expect = 2f64.sqrt() * 2.0 / (eps * eps * eps);
        assert!((a1_constant(eps, &p, TAU) - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn geometry_on_cutoff_example() {
        let h = example_anisotropic(1, &[1.0], &[1.0]).unwrap();
        let p = ScalingProfile::minimal(vec![1.0], vec![1.0]).unwrap();
        let eps1 = epsilon1_surrogate(1, 8, TAU, 200, 1);
        assert!(eps1 > 0.0 && eps1 < 1.0);
        let a1 = a1_constant(eps1, &p, TAU);
        // The raw model needs an astronomically large A₂.
        assert!(a2_constant(&h, a1).is_err());
        let hk = crate::hamiltonians::cutoff(&h, 10.0, 2.0, a1).unwrap();
        let f = ActionFunctional::new(&hk, 8, TAU).unwrap();
        let (g, c) = construct_geometry(&f, eps1, a1, 100, 2).unwrap();
        assert!(c.a2 > 10.0 && c.a2 < 30.0, "{c:?}");
        assert!(g.nu > g.mu);
        let d = g.level_diagnostics(&f, 200, 3).unwrap();
        assert!(d.ok(), "{d:?}");
        let seeds = linking_seed_set(&g, 8, 12, 4);
        assert_eq!(seeds.len(), 12);
        for s in seeds.iter().filter(|s| s.kind == SeedKind::Sphere) {
            assert!(f.value(&s.z).unwrap() >= g.delta);
        }
        for s in seeds.iter().filter(|s| s.kind == SeedKind::Boundary) {
            assert!(f.value(&s.z).unwrap() <= 0.0);
        }
    }
}
