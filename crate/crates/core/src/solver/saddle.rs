//! Saddle search on `f_m`: a local minimax predictor followed by deflated
//! Newton polishing, run over seeds in fixed-size parallel waves.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{index_pair_galerkin, nullity_from_monodromy, GalerkinOptions, Gap, IndexPair};
use crate::loopspace::{same_period, FourierLoop, Grid};
use crate::symplectic::{fundamental_solution, FlowOptions};

use super::certify::{reintegrate, shift_distance, Shifts};
use super::functional::ActionFunctional;
use super::geometry::LinkingGeometry;

/// Settings shared by [`find_saddle`] and the subharmonic driver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Galerkin truncation order.
    pub m: usize,
    /// Residual tolerance in the `E`-norm.
    pub tol: f64,
    pub max_newton: usize,
    /// Local minimax steps before Newton takes over.
    pub max_predictor: usize,
    /// Oscillation threshold, relative to `1 + ‖z‖`.
    pub nonconst_tol: f64,
    /// Slack on the value window as a fraction of `δ`.
    pub slack: f64,
    /// Number of linking seeds.
    pub seeds: usize,
    /// Seeds solved concurrently before the deflation list is merged.
    pub wave_size: usize,
    pub deflation_power: f64,
    pub deflation_shift: f64,
    /// Cut-off radii tried in turn.
    pub cutoff_radii: Vec<f64>,
    /// `λ₀` for the cut-off; the midpoint of `(γ, 1+β)` when absent.
    pub lambda0: Option<f64>,
    /// Samples for `ε̂₁`, `μ` and the level diagnostics.
    pub geometry_samples: usize,
    /// Zero tolerance for index classification.
    pub zero_tol: f64,
    /// Random seed for all sampling.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            m: 64,
            tol: 1e-9,
            max_newton: 500,
            max_predictor: 40,
            nonconst_tol: 1e-6,
            slack: 0.1,
            seeds: 12,
            wave_size: 8,
            deflation_power: 2.0,
            deflation_shift: 1.0,
            cutoff_radii: vec![10.0, 100.0, 1000.0],
            lambda0: None,
            geometry_samples: 200,
            zero_tol: 1e-7,
            seed: 20240917,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tol", self.tol),
            ("nonconst_tol", self.nonconst_tol),
            ("deflation_power", self.deflation_power),
            ("deflation_shift", self.deflation_shift),
            ("zero_tol", self.zero_tol),
        ];
        for (field, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config {
                    field: field.into(),
                    message: format!("must be positive, got {v}"),
                });
            }
        }
        if !(self.slack >= 0.0) {
            return Err(Error::Config {
                field: "slack".into(),
                message: "must be non-negative".into(),
            });
        }
        let counts = [
            ("m", self.m),
            ("max_newton", self.max_newton),
            ("seeds", self.seeds),
            ("wave_size", self.wave_size),
            ("geometry_samples", self.geometry_samples),
        ];
        for (field, v) in counts {
            if v == 0 {
                return Err(Error::Config {
                    field: field.into(),
                    message: "must be at least 1".into(),
                });
            }
        }
        if self.cutoff_radii.is_empty() || self.cutoff_radii.iter().any(|&k| !(k >= 1.0)) {
            return Err(Error::Config {
                field: "cutoff_radii".into(),
                message: "need at least one radius, each ≥ 1".into(),
            });
        }
        Ok(())
    }
}

/// An accepted critical point of `f_m` with its certificates.
#[derive(Clone, Debug, Serialize)]
pub struct SaddleResult {
    #[serde(skip)]
    pub z: FourierLoop,
    pub value: f64,
    pub residual: f64,
    /// `(1 + ‖z‖)·residual`.
    pub c_diagnostic: f64,
    pub morse_index: usize,
    pub morse_nullity: usize,
    /// `½ dim E_m = n(2m+1)`.
    pub half_dim_em: usize,
    /// Index pair of `B(t) = H″(t, z(t))`.
    pub maslov: Option<IndexPair>,
    /// Truncation at which the pair stabilized, or why it did not.
    pub maslov_m: Option<usize>,
    pub maslov_note: Option<String>,
    pub monodromy_nullity: Option<usize>,
    /// `i ≤ n+1 ≤ i+ν`.
    pub window_ok: bool,
    /// `m(z) ≤ dim X_m + 1 ≤ m*(z)` with `X_m = E⁻_m ⊕ E⁰`, the Morse
    /// signature of a linking critical point of `f_m`.
    pub morse_window_ok: bool,
    /// `morse_index − ½ dim E_m = i` and `morse_nullity = ν`.
    pub morse_maslov_consistent: bool,
    pub value_window: (f64, f64),
    pub period: f64,
    pub k: usize,
    pub norm: f64,
    pub sup_norm: f64,
    pub oscillation: f64,
    pub reintegration_error: Option<f64>,
    pub seed_index: usize,
    pub newton_steps: usize,
    pub predictor_steps: usize,
    pub cutoff_k: Option<f64>,
}

impl SaddleResult {
    pub fn half_dim(&self) -> usize {
        self.z.half_dim()
    }

    /// A result for a loop obtained elsewhere, carrying only its index pair.
    /// Numeric diagnostics are NaN and counts zero.
    pub fn external(z: FourierLoop, maslov: Option<IndexPair>, k: usize) -> Self {
        let n = z.half_dim() as i64;
        let window_ok = maslov.is_some_and(|p| p.i <= n + 1 && n + 1 <= p.i + p.nu as i64);
        Self {
            value: f64::NAN,
            residual: f64::NAN,
            c_diagnostic: f64::NAN,
            morse_index: 0,
            morse_nullity: 0,
            half_dim_em: z.half_dim() * (2 * z.m() + 1),
            maslov,
            maslov_m: None,
            maslov_note: None,
            monodromy_nullity: None,
            window_ok,
            morse_window_ok: false,
            morse_maslov_consistent: false,
            value_window: (f64::NAN, f64::NAN),
            period: z.period(),
            k,
            norm: z.norm(),
            sup_norm: f64::NAN,
            oscillation: f64::NAN,
            reintegration_error: None,
            seed_index: 0,
            newton_steps: 0,
            predictor_steps: 0,
            cutoff_k: None,
            z,
        }
    }
}

/// Why a seed produced no accepted solution.
#[derive(Clone, Debug, Serialize)]
pub struct SeedFailure {
    pub seed_index: usize,
    pub residual: f64,
    pub value: f64,
    pub reason: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SaddleSearch {
    pub results: Vec<SaddleResult>,
    pub failures: Vec<SeedFailure>,
}

/// Index ranges of the splitting in orthonormal coordinates: modes `k ≤ 0`
/// come first, modes `k > 0` last.
#[derive(Clone, Copy)]
struct Split {
    nl: usize,
    dim: usize,
}

impl Split {
    fn new(f: &ActionFunctional) -> Self {
        let w = 2 * f.half_dim();
        Self {
            nl: w * (f.m() + 1),
            dim: f.dim(),
        }
    }

    fn np(&self) -> usize {
        self.dim - self.nl
    }

    fn embed(&self, s: f64, v: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(self.dim);
        x.rows_mut(0, self.nl).copy_from(y);
        x.rows_mut(self.nl, self.np()).copy_from(&(v * s));
        x
    }
}

struct Eval<'a> {
    f: &'a ActionFunctional,
}

impl Eval<'_> {
    fn value(&self, x: &DVector<f64>) -> Result<f64> {
        self.f.value(&self.f.loop_from_coords(x))
    }

    fn grad(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.f.gradient_coords(&self.f.loop_from_coords(x))
    }

    fn hess(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.f.hessian(&self.f.loop_from_coords(x))
    }
}

/// Solves with the eigen-decomposition, dividing by `|λ|` (ascent for the
/// peak problem) or by `λ` (Newton) and skipping `|λ| ≤ cut`.
fn spectral_solve(h: DMatrix<f64>, g: &DVector<f64>, absolute: bool, rel_cut: f64) -> DVector<f64> {
    let eig = SymmetricEigen::new(h);
    let lmax = eig.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max).max(1.0);
    let cut = rel_cut * lmax;
    let mut out = DVector::zeros(g.len());
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        let q = eig.eigenvectors.column(i);
        let c = q.dot(g);
        let denom = if absolute { l.abs().max(cut) } else if l.abs() > cut { l } else { continue };
        out += q * (c / denom);
    }
    out
}

struct Peak {
    s: f64,
    y: DVector<f64>,
    x: DVector<f64>,
    value: f64,
    grad: DVector<f64>,
}

/// Maximizes `φ(s, y) = f(sv + y)` over `s > 0`, `y ∈ E⁻ ⊕ E⁰`.
fn peak(ev: &Eval, sp: Split, v: &DVector<f64>, s0: f64, y0: &DVector<f64>) -> Result<Peak> {
    let (mut s, mut y) = (s0, y0.clone());
    if !(s > 1e-10) {
        let mut best = (f64::NEG_INFINITY, 1.0);
        for j in 0..=60 {
            let t = 10f64.powf(-3.0 + 0.1 * j as f64);
            let val = ev.value(&sp.embed(t, v, &y))?;
            if val > best.0 {
                best = (val, t);
            }
        }
        s = best.1;
    }
    let mut x = sp.embed(s, v, &y);
    let mut value = ev.value(&x)?;
    let mut grad = ev.grad(&x)?;
    for _ in 0..60 {
        let mut gr = DVector::zeros(1 + sp.nl);
        gr[0] = grad.rows(sp.nl, sp.np()).dot(v);
        gr.rows_mut(1, sp.nl).copy_from(&grad.rows(0, sp.nl));
        if gr.norm() <= 1e-11 * (1.0 + x.norm()) {
            break;
        }
        let h = ev.hess(&x)?;
        let hv = h.columns(sp.nl, sp.np()) * v;
        let mut r = DMatrix::zeros(1 + sp.nl, 1 + sp.nl);
        r[(0, 0)] = hv.rows(sp.nl, sp.np()).dot(v);
        for i in 0..sp.nl {
            r[(0, 1 + i)] = hv[i];
            r[(1 + i, 0)] = hv[i];
        }
        r.view_mut((1, 1), (sp.nl, sp.nl)).copy_from(&h.view((0, 0), (sp.nl, sp.nl)));
        let mut step = spectral_solve(r, &gr, true, 1e-8);
        let cap = 0.5 * (1.0 + s.hypot(y.norm()));
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        let slope = gr.dot(&step);
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha > 1e-6 {
            let s_new = s + alpha * step[0];
            if s_new > 0.0 {
                let y_new = &y + step.rows(1, sp.nl) * alpha;
                let x_new = sp.embed(s_new, v, &y_new);
                let val = ev.value(&x_new)?;
                if val >= value + 1e-4 * alpha * slope {
                    s = s_new;
                    y = y_new;
                    x = x_new;
                    value = val;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
        grad = ev.grad(&x)?;
    }
    Ok(Peak { s, y, x, value, grad })
}

/// Local minimax: descend `v ↦ max φ` on the unit sphere of `E⁺`.
fn predictor(ev: &Eval, sp: Split, x0: &DVector<f64>, max_steps: usize, omega: f64) -> Result<(DVector<f64>, usize)> {
    let xp = x0.rows(sp.nl, sp.np()).into_owned();
    let (mut v, s0) = if xp.norm() > 1e-12 {
        (&xp / xp.norm(), xp.norm())
    } else {
        // The first-plane k = 1 direction.
        let mut v = DVector::zeros(sp.np());
        v[0] = 1.0;
        (v, 0.0)
    };
    let mut pk = peak(ev, sp, &v, s0, &x0.rows(0, sp.nl).into_owned())?;
    let mut steps = 0;
    for _ in 0..max_steps {
        let gp = pk.grad.rows(sp.nl, sp.np()).into_owned();
        let gt = &gp - &v * gp.dot(&v);
        if gt.norm() <= 1e-4 * (1.0 + pk.x.norm()) {
            break;
        }
        let mut beta = 1.0 / (omega * pk.s);
        let mut moved = false;
        for _ in 0..10 {
            let w = &v - &gt * beta;
            let w = &w / w.norm();
            let trial = peak(ev, sp, &w, pk.s, &pk.y)?;
            if trial.value < pk.value - 1e-4 * beta * pk.s * gt.norm_squared() {
                v = w;
                pk = trial;
                moved = true;
                break;
            }
            beta *= 0.5;
        }
        steps += 1;
        if !moved {
            break;
        }
    }
    Ok((pk.x, steps))
}

/// `M(x) = Π(‖x − x_i‖^{−p} + σ)` and `∇ln M`.
fn deflation(x: &DVector<f64>, roots: &[DVector<f64>], p: f64, shift: f64) -> (f64, DVector<f64>) {
    let mut m = 1.0;
    let mut u = DVector::zeros(x.len());
    for r in roots {
        let d = x - r;
        let dn = d.norm().max(1e-300);
        let a = dn.powf(-p);
        m *= a + shift;
        u -= &d * (p * a / (dn * dn) / (a + shift));
    }
    (m, u)
}

struct NewtonOutcome {
    x: DVector<f64>,
    residual: f64,
    steps: usize,
}

/// Deflated Newton with an eigen pseudo-inverse and backtracking on
/// `M(x)·‖∇f(x)‖`.
fn newton(ev: &Eval, x0: DVector<f64>, roots: &[DVector<f64>], opts: &SolverOptions) -> Result<NewtonOutcome> {
    let mut x = x0;
    let mut g = ev.grad(&x)?;
    let mut r = g.norm();
    let mut stall = 0;
    let mut steps = 0;
    let (mut best_r, mut since_best) = (r, 0);
    while steps < opts.max_newton && r > opts.tol {
        steps += 1;
        // Give up once 50 steps bring no 10% improvement.
        if r < 0.9 * best_r {
            best_r = r;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best > 50 {
                break;
            }
        }
        let h = ev.hess(&x)?;
        let mut delta = -spectral_solve(h, &g, false, 1e-10);
        let (m0, u) = deflation(&x, roots, opts.deflation_power, opts.deflation_shift);
        let denom = 1.0 - u.dot(&delta);
        if denom.abs() > 1e-8 {
            delta /= denom;
        }
        let cap = 1.0 + x.norm();
        if delta.norm() > cap {
            delta *= cap / delta.norm();
        }
        let merit = m0 * r;
        let mut alpha = 1.0;
        let mut best: Option<(f64, DVector<f64>, DVector<f64>, f64)> = None;
        for _ in 0..12 {
            let xt = &x + &delta * alpha;
            let gt = ev.grad(&xt)?;
            let rt = gt.norm();
            if rt.is_finite() {
                let mt = deflation(&xt, roots, opts.deflation_power, opts.deflation_shift).0 * rt;
                if mt < (1.0 - 1e-4 * alpha) * merit {
                    best = Some((mt, xt, gt, rt));
                    break;
                }
                if best.as_ref().is_none_or(|b| mt < b.0) {
                    best = Some((mt, xt, gt, rt));
                }
            }
            alpha *= 0.5;
        }
        let Some((mt, xt, gt, rt)) = best else {
            break;
        };
        if mt >= merit {
            stall += 1;
            if stall > 20 {
                break;
            }
        } else {
            stall = 0;
        }
        x = xt;
        g = gt;
        r = rt;
        if !x.iter().all(|v| v.is_finite()) || x.norm() > 1e12 {
            break;
        }
    }
    Ok(NewtonOutcome { x, residual: r, steps })
}

/// Seed outcome before acceptance.
struct Converged {
    seed_index: usize,
    x: DVector<f64>,
    residual: f64,
    value: f64,
    newton_steps: usize,
    predictor_steps: usize,
}

fn solve_seed(
    f: &ActionFunctional,
    seed_index: usize,
    x0: &DVector<f64>,
    roots: &[DVector<f64>],
    opts: &SolverOptions,
) -> std::result::Result<Converged, SeedFailure> {
    let ev = Eval { f };
    let sp = Split::new(f);
    let omega = 2.0 * std::f64::consts::PI / f.period();
    let fail = |reason: String, x: &DVector<f64>| {
        let residual = ev.grad(x).map(|g| g.norm()).unwrap_or(f64::NAN);
        let value = ev.value(x).unwrap_or(f64::NAN);
        SeedFailure {
            seed_index,
            residual,
            value,
            reason,
        }
    };
    let (x1, predictor_steps) = predictor(&ev, sp, x0, opts.max_predictor, omega).map_err(|e| fail(e.to_string(), x0))?;
    let out = newton(&ev, x1, roots, opts).map_err(|e| fail(e.to_string(), x0))?;
    if out.residual > opts.tol {
        let mut fl = fail(format!("Newton stopped after {} steps", out.steps), &out.x);
        fl.residual = out.residual;
        return Err(fl);
    }
    let value = ev.value(&out.x).map_err(|e| fail(e.to_string(), &out.x))?;
    Ok(Converged {
        seed_index,
        x: out.x,
        residual: out.residual,
        value,
        newton_steps: out.steps,
        predictor_steps,
    })
}

/// Shift symmetries of `f_m`: all shifts for autonomous models, multiples of
/// the model period otherwise.
pub(crate) fn symmetry_shifts(f: &ActionFunctional) -> Shifts {
    if f.model().autonomous() {
        Shifts::Continuous
    } else {
        Shifts::Multiples(f.model().period())
    }
}

/// Index data, norms and the re-integration check for a critical point.
pub(crate) fn certify_solution(
    f: &ActionFunctional,
    z: &FourierLoop,
    zero_tol: f64,
) -> Result<SaddleResult> {
    let n = f.half_dim();
    let m = f.m();
    let spec = f.hessian_spectrum(z, Gap::Adaptive, zero_tol)?;
    let half = n * (2 * m + 1);
    let lin = f.linearization(z)?;
    let gopts = GalerkinOptions {
        schedule: vec![m, 2 * m, 4 * m],
        gap: Gap::Adaptive,
        zero_tol,
    };
    let (maslov, maslov_m, maslov_note) = match index_pair_galerkin(&lin, &gopts) {
        Ok((p, s)) => (Some(p), Some(s.m), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    let steps = 4096 * (f.period() / (2.0 * std::f64::consts::PI)).ceil().max(1.0) as usize;
    let monodromy_nullity = fundamental_solution(&lin, FlowOptions::steps(steps))
        .ok()
        .map(|g| nullity_from_monodromy(&g, 1e-6));
    let n_i = n as i64;
    let window_ok = maslov.is_some_and(|p| p.i <= n_i + 1 && n_i + 1 <= p.i + p.nu as i64);
    let dim_x = 2 * n * (m + 1);
    let morse_window_ok = spec.morse_index <= dim_x + 1 && dim_x + 1 <= spec.morse_index + spec.nullity;
    let morse_maslov_consistent =
        maslov.is_some_and(|p| spec.morse_index as i64 - half as i64 == p.i && spec.nullity == p.nu);
    let grid = Grid::new(f.grid_size(), f.period());
    let samples = grid.synthesize(z);
    let mean = DVector::from_column_slice(z.coeff(0));
    let sup_norm = samples.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let oscillation = samples.iter().map(|x| (x - &mean).norm()).fold(0.0, f64::max);
    let residual = f.residual(z)?;
    let reintegration_error = reintegrate(f.model(), z, steps).ok();
    let norm = z.norm();
    let res = SaddleResult {
        z: z.clone(),
        value: f.value(z)?,
        residual,
        c_diagnostic: (1.0 + norm) * residual,
        morse_index: spec.morse_index,
        morse_nullity: spec.nullity,
        half_dim_em: half,
        maslov,
        maslov_m,
        maslov_note,
        monodromy_nullity,
        window_ok,
        morse_window_ok,
        morse_maslov_consistent,
        value_window: (f64::NAN, f64::NAN),
        period: f.period(),
        k: 1,
        norm,
        sup_norm,
        oscillation,
        reintegration_error,
        seed_index: 0,
        newton_steps: 0,
        predictor_steps: 0,
        cutoff_k: f.model().cutoff_info().map(|c| c.k),
    };
    Ok(res)
}

/// Runs every seed through the predictor and deflated Newton, in waves of
/// `opts.wave_size`. Converged points of a wave join the deflation list
/// before the next wave, so results do not depend on thread scheduling.
///
/// Accepted solutions have residual `≤ opts.tol`, a value inside the
/// slackened window of `g`, oscillation `≥ opts.nonconst_tol·(1+‖z‖)`, the
/// Morse signature `m(z) ≤ dim X_m + 1 ≤ m*(z)` of a linking critical point,
/// stay inside the cut-off ball, and are not shifts of each other or of a
/// `deflated` loop.
pub fn find_saddle(
    f: &ActionFunctional,
    g: &LinkingGeometry,
    seeds: &[FourierLoop],
    deflated: &[FourierLoop],
    opts: &SolverOptions,
) -> Result<SaddleSearch> {
    if seeds.is_empty() {
        return Err(Error::InvalidInput("find_saddle needs at least one seed".into()));
    }
    opts.validate()?;
    let coords = |z: &FourierLoop| -> Result<DVector<f64>> {
        if z.half_dim() != f.half_dim() || !same_period(z.period(), f.period()) {
            return Err(Error::Dimension("seed does not match the functional".into()));
        }
        Ok(z.with_truncation(f.m()).to_coords())
    };
    let starts: Vec<DVector<f64>> = seeds.iter().map(coords).collect::<Result<_>>()?;
    let deflated: Vec<FourierLoop> = deflated.iter().map(|z| z.with_truncation(f.m())).collect();
    let mut roots: Vec<DVector<f64>> = deflated.iter().map(|z| z.to_coords()).collect();
    let window = g.value_window(opts.slack);
    let shifts = symmetry_shifts(f);
    let mut out = SaddleSearch::default();
    for (w, wave) in starts.chunks(opts.wave_size).enumerate() {
        let base = w * opts.wave_size;
        let outcomes: Vec<_> = wave
            .par_iter()
            .enumerate()
            .map(|(j, x0)| solve_seed(f, base + j, x0, &roots, opts))
            .collect();
        for outcome in outcomes {
            let c = match outcome {
                Ok(c) => c,
                Err(fl) => {
                    log::info!("seed {}: {}", fl.seed_index, fl.reason);
                    out.failures.push(fl);
                    continue;
                }
            };
            roots.push(c.x.clone());
            let z = f.loop_from_coords(&c.x);
            let reject = |reason: String| SeedFailure {
                seed_index: c.seed_index,
                residual: c.residual,
                value: c.value,
                reason,
            };
            let scale = 1.0 + z.norm();
            if deflated.iter().any(|d| shift_distance(d, &z, shifts).0 < 1e-4) {
                out.failures.push(reject("converged to a deflated solution".into()));
                continue;
            }
            if out.results.iter().any(|r| shift_distance(&r.z, &z, shifts).0 < 1e-6 * scale) {
                out.failures.push(reject("duplicate of an accepted solution".into()));
                continue;
            }
            if !(c.value >= window.0 && c.value <= window.1) {
                out.failures.push(reject(format!(
                    "value {:.6e} outside [{:.6e}, {:.6e}]",
                    c.value, window.0, window.1
                )));
                continue;
            }
            let mut res = certify_solution(f, &z, opts.zero_tol)?;
            if res.oscillation < opts.nonconst_tol * scale {
                out.failures.push(reject("constant solution".into()));
                continue;
            }
            if !res.morse_window_ok {
                out.failures.push(reject(format!(
                    "Morse index {} with nullity {} is not of linking type",
                    res.morse_index, res.morse_nullity
                )));
                continue;
            }
            if let Some(k) = res.cutoff_k {
                if res.sup_norm > k {
                    out.failures.push(reject(format!("sup |z| = {:.3e} exceeds K = {k}", res.sup_norm)));
                    continue;
                }
            }
            res.value_window = window;
            res.seed_index = c.seed_index;
            res.newton_steps = c.newton_steps;
            res.predictor_steps = c.predictor_steps;
            log::info!(
                "seed {}: accepted value {:.6e}, residual {:.2e}, Maslov {:?}",
                c.seed_index,
                res.value,
                res.residual,
                res.maslov.map(|p| (p.i, p.nu))
            );
            out.results.push(res);
        }
    }
    Ok(out)
}
