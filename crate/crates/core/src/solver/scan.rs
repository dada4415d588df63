//! Orbits at period `kτ` on the cut-off model, with `K` escalated until a
//! solution inside the ball is found.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonians::{cutoff, HamiltonianModel};
use crate::loopspace::ScalingProfile;

use super::functional::ActionFunctional;
use super::geometry::{
    a1_constant, construct_geometry, epsilon1_surrogate, linking_seed_set, GeometryConstants, LevelDiagnostics,
    LinkingGeometry,
};
use super::saddle::{find_saddle, SaddleResult, SaddleSearch, SolverOptions};

/// Everything computed for one period `kτ`.
#[derive(Clone, Debug, Serialize)]
pub struct ScanEntry {
    pub k: usize,
    pub period: f64,
    /// The cut-off radius of the final attempt.
    pub cutoff_k: Option<f64>,
    pub lambda0: Option<f64>,
    pub c_k: Option<f64>,
    pub geometry: Option<LinkingGeometry>,
    pub constants: Option<GeometryConstants>,
    pub levels: Option<LevelDiagnostics>,
    pub search: SaddleSearch,
    /// Set when the period was skipped or the pipeline failed.
    pub error: Option<String>,
}

impl ScanEntry {
    fn empty(k: usize, period: f64) -> Self {
        Self {
            k,
            period,
            cutoff_k: None,
            lambda0: None,
            c_k: None,
            geometry: None,
            constants: None,
            levels: None,
            search: SaddleSearch::default(),
            error: None,
        }
    }

    pub fn results(&self) -> &[SaddleResult] {
        &self.search.results
    }
}

/// The admissible `λ₀`: the configured one, or the midpoint of `(γ, 1+β)`.
fn lambda0(model: &HamiltonianModel, opts: &SolverOptions) -> Result<f64> {
    let g = model
        .growth()
        .ok_or_else(|| Error::InvalidInput("the solver needs a model with growth data".into()))?;
    Ok(opts.lambda0.unwrap_or(0.5 * (g.gamma() + 1.0 + g.beta)))
}

/// Solves at period `period` (a multiple of the model period for
/// time-dependent models), labelling results with `k`.
pub fn solve_period(model: &HamiltonianModel, period: f64, k: usize, opts: &SolverOptions) -> Result<ScanEntry> {
    opts.validate()?;
    let growth = model
        .growth()
        .ok_or_else(|| Error::InvalidInput("the solver needs a model with growth data".into()))?;
    let profile = ScalingProfile::minimal(growth.sigma.clone(), growth.tau_exp.clone())?;
    let n = model.half_dim();
    let seed = opts.seed.wrapping_add(1000 * k as u64);
    let eps1 = epsilon1_surrogate(n, opts.m, period, opts.geometry_samples, seed);
    let a1 = a1_constant(eps1, &profile, period);
    let l0 = lambda0(model, opts)?;
    let mut entry = ScanEntry::empty(k, period);
    entry.lambda0 = Some(l0);
    for &radius in &opts.cutoff_radii {
        let hk = cutoff(model, radius, l0, a1)?;
        let f = ActionFunctional::new(&hk, opts.m, period)?;
        let (g, consts) = construct_geometry(&f, eps1, a1, opts.geometry_samples, seed + 1)?;
        let levels = g.level_diagnostics(&f, opts.geometry_samples, seed + 2)?;
        let seeds: Vec<_> = linking_seed_set(&g, opts.m, opts.seeds, seed + 3).into_iter().map(|s| s.z).collect();
        log::info!(
            "k = {k}, K = {radius}: μ = {:.3e}, ν = {:.3e}, δ = {:.3e}, ε̂₁ = {eps1:.3e}, A₂ = {:.3e}",
            g.mu,
            g.nu,
            g.delta,
            consts.a2
        );
        let mut search = find_saddle(&f, &g, &seeds, &[], opts)?;
        for r in &mut search.results {
            r.k = k;
        }
        entry.cutoff_k = Some(radius);
        entry.c_k = hk.cutoff_info().map(|c| c.c_k);
        entry.geometry = Some(g);
        entry.constants = Some(consts);
        entry.levels = Some(levels);
        let found = !search.results.is_empty();
        entry.search = search;
        if found {
            break;
        }
    }
    Ok(entry)
}

/// Solves at each period `kτ`, `k ∈ k_list`. Failures are recorded per `k`.
/// For models with a quadratic term of size `ω`, periods with
/// `k ≥ 2π/(ωτ)` are skipped.
pub fn subharmonic_scan(model: &HamiltonianModel, tau: f64, k_list: &[usize], opts: &SolverOptions) -> Result<Vec<ScanEntry>> {
    if k_list.is_empty() || k_list.contains(&0) {
        return Err(Error::InvalidInput("k_list must hold positive integers".into()));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidInput(format!("τ = {tau} must be positive")));
    }
    opts.validate()?;
    let mut out = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let period = k as f64 * tau;
        if let Some(q) = model.quadratic_term() {
            if q.omega() > 0.0 && k as f64 >= 2.0 * std::f64::consts::PI / (q.omega() * tau) {
                let mut e = ScanEntry::empty(k, period);
                e.error = Some(format!(
                    "skipped: k = {k} ≥ 2π/(ωτ) = {:.4}",
                    2.0 * std::f64::consts::PI / (q.omega() * tau)
                ));
                out.push(e);
                continue;
            }
        }
        match solve_period(model, period, k, opts) {
            Ok(e) => out.push(e),
            Err(err) => {
                log::warn!("k = {k}: {err}");
                let mut e = ScanEntry::empty(k, period);
                e.error = Some(err.to_string());
                out.push(e);
            }
        }
    }
    Ok(out)
}
