//! Configuration files and reproducible batch runs.
//!
//! A run reads a [`RunConfig`], executes one pipeline and writes
//! `summary.json`, `manifest.json`, and depending on the mode `indices.csv`
//! and `solutions/*.csv`. Identical configurations give byte-identical
//! summaries.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hamiltonians::{
    check_hypotheses, example_anisotropic, with_quadratic_term, HamiltonianModel, Hypothesis, HypothesisReport,
    QuadraticTerm, SamplingSpec,
};
use crate::index::{
    check_iteration_bounds, index_pair_galerkin, index_pair_iterated, nullity_from_monodromy, GalerkinOptions, IndexPair,
    IterationReport,
};
use crate::solver::{
    distinctness_check, minimal_period_check, solve_period, subharmonic_scan, DistinctnessVerdict,
    MinimalPeriodVerdict, SaddleResult, ScanEntry, SolverOptions,
};
use crate::symplectic::{fundamental_solution, iterate_path, FlowOptions, MatrixPath};

/// Default seed for every randomized step.
pub const DEFAULT_SEED: u64 = 20240917;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Index pairs of a linear path and its iterates.
    Index,
    /// One orbit at period `τ`.
    #[default]
    Solve,
    /// Orbits at periods `kτ` for `k` in `k_list`, with distinctness checks.
    Scan,
    /// Hypothesis checks on a nonlinear model.
    Check,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Index => "index",
            Self::Solve => "solve",
            Self::Scan => "scan",
            Self::Check => "check",
        })
    }
}

/// A matrix path `B(t)`: a sample file or a constant multiple of the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    /// Path to a matrix-series file, relative to the config file.
    pub file: Option<PathBuf>,
    /// `B ≡ b·I`.
    pub constant: Option<f64>,
    /// Half-dimension for `constant`.
    pub n: Option<usize>,
    /// Period for `constant`; `2π` when absent.
    pub period: Option<f64>,
}

impl PathSpec {
    fn load(&self, base: Option<&Path>, field: &str) -> Result<MatrixPath> {
        match (&self.file, self.constant) {
            (Some(file), None) => {
                let full = match base {
                    Some(b) if file.is_relative() => b.join(file),
                    _ => file.clone(),
                };
                MatrixPath::load(&full).map_err(|e| Error::Config {
                    field: format!("{field}.file"),
                    message: format!("{}: {e}", full.display()),
                })
            }
            (None, Some(b)) => {
                let n = self.n.unwrap_or(1);
                let period = self.period.unwrap_or(std::f64::consts::TAU);
                MatrixPath::constant(DMatrix::identity(2 * n, 2 * n) * b, period).map_err(|e| Error::Config {
                    field: field.into(),
                    message: e.to_string(),
                })
            }
            _ => Err(Error::Config {
                field: field.into(),
                message: "give exactly one of `file` and `constant`".into(),
            }),
        }
    }

    fn validate(&self, field: &str) -> Result<()> {
        if self.file.is_some() == self.constant.is_some() {
            return Err(Error::Config {
                field: field.into(),
                message: "give exactly one of `file` and `constant`".into(),
            });
        }
        if let Some(b) = self.constant {
            if !b.is_finite() {
                return Err(cfg_err(&format!("{field}.constant"), "must be finite"));
            }
            if self.n == Some(0) {
                return Err(cfg_err(&format!("{field}.n"), "must be at least 1"));
            }
            if self.period.is_some_and(|p| !(p > 0.0 && p.is_finite())) {
                return Err(cfg_err(&format!("{field}.period"), "must be positive"));
            }
        }
        Ok(())
    }
}

/// The system under study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// The anisotropic example with exponents `σ_i`, `τ_i`.
    ExampleAnisotropic {
        n: usize,
        sigma: Vec<f64>,
        tau_exp: Vec<f64>,
    },
    /// The example plus a periodic quadratic term `½⟨B̂(t)z, z⟩`.
    QuadraticPlus {
        n: usize,
        sigma: Vec<f64>,
        tau_exp: Vec<f64>,
        bhat: PathSpec,
    },
    /// A linear system `ż = JB(t)z`, for index mode.
    Linear { path: PathSpec },
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self::ExampleAnisotropic {
            n: 1,
            sigma: vec![1.0],
            tau_exp: vec![1.0],
        }
    }
}

impl ModelSpec {
    fn validate(&self) -> Result<()> {
        let exps = |n: usize, sigma: &[f64], tau: &[f64]| -> Result<()> {
            if n == 0 {
                return Err(cfg_err("model.n", "must be at least 1"));
            }
            for (name, v) in [("model.sigma", sigma), ("model.tau_exp", tau)] {
                if v.len() != n {
                    return Err(cfg_err(name, &format!("expected {n} entries, got {}", v.len())));
                }
                if v.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                    return Err(cfg_err(name, "entries must be positive"));
                }
            }
            Ok(())
        };
        match self {
            Self::ExampleAnisotropic { n, sigma, tau_exp } => exps(*n, sigma, tau_exp),
            Self::QuadraticPlus { n, sigma, tau_exp, bhat } => {
                exps(*n, sigma, tau_exp)?;
                bhat.validate("model.bhat")
            }
            Self::Linear { path } => path.validate("model.path"),
        }
    }

    fn nonlinear(&self, base: Option<&Path>) -> Result<HamiltonianModel> {
        match self {
            Self::ExampleAnisotropic { n, sigma, tau_exp } => example_anisotropic(*n, sigma, tau_exp),
            Self::QuadraticPlus { n, sigma, tau_exp, bhat } => {
                let h = example_anisotropic(*n, sigma, tau_exp)?;
                let b = bhat.load(base, "model.bhat")?;
                with_quadratic_term(&h, QuadraticTerm::new(b))
            }
            Self::Linear { .. } => Err(cfg_err("model.kind", "this mode needs a nonlinear model")),
        }
    }

    fn linear(&self, base: Option<&Path>) -> Result<MatrixPath> {
        match self {
            Self::Linear { path } => path.load(base, "model.path"),
            _ => Err(cfg_err("model.kind", "index mode needs `kind = \"linear\"`")),
        }
    }
}

/// Settings for index computations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndexSettings {
    /// Truncation orders tried until two consecutive ones agree.
    pub schedule: Vec<usize>,
    pub zero_tol: f64,
    /// Singular-value threshold for the monodromy nullity.
    pub rank_tol: f64,
    /// Integration steps per base period for the monodromy.
    pub flow_steps: usize,
}

impl Default for IndexSettings {
    fn default() -> Self {
        Self {
            schedule: GalerkinOptions::default().schedule,
            zero_tol: 1e-7,
            rank_tol: 1e-6,
            flow_steps: 4096,
        }
    }
}

/// Settings for hypothesis checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckSettings {
    /// Names such as `"H1"` or `"H3'"`.
    pub hypotheses: Vec<String>,
    /// Sample radii; the default ladder when absent.
    pub radii: Option<Vec<f64>>,
    pub directions: usize,
}

impl Default for CheckSettings {
    fn default() -> Self {
        Self {
            hypotheses: Hypothesis::BASIC.iter().map(|h| h.to_string()).collect(),
            radii: None,
            directions: 64,
        }
    }
}

fn parse_hypothesis(name: &str) -> Option<Hypothesis> {
    Hypothesis::ALL.into_iter().find(|h| h.to_string().eq_ignore_ascii_case(name.trim()))
}

/// A complete run description. The top-level `seed` drives every random
/// choice and replaces `solver.seed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub seed: u64,
    /// Base period `τ`; the model or path period when absent.
    pub tau: Option<f64>,
    /// Period multipliers for `index` and `scan`.
    pub k_list: Vec<usize>,
    /// Samples of `t ↦ z(t)` written per solution; 0 disables the files.
    pub plot_samples: usize,
    /// Output directory; not part of the config hash.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    pub model: ModelSpec,
    pub solver: SolverOptions,
    pub index: IndexSettings,
    pub check: CheckSettings,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Solve,
            seed: DEFAULT_SEED,
            tau: None,
            k_list: vec![1],
            plot_samples: 256,
            out: None,
            model: ModelSpec::default(),
            solver: SolverOptions::default(),
            index: IndexSettings::default(),
            check: CheckSettings::default(),
            base_dir: None,
        }
    }
}

fn cfg_err(field: &str, message: &str) -> Error {
    Error::Config {
        field: field.into(),
        message: message.into(),
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    1 + text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count()
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map_or(1, |s| line_of(text, s.start)),
            message: e.message().to_string(),
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    /// Reads a `.json` file as JSON and anything else as TOML. Relative paths
    /// inside the config are resolved against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::from_json_str(&text)?
        } else {
            Self::from_toml_str(&text)?
        };
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Sets the truncation order: `solver.m = m` and the index schedule
    /// `m, 2m, 4m`.
    pub fn set_modes(&mut self, m: usize) {
        self.solver.m = m;
        self.index.schedule = vec![m, 2 * m, 4 * m];
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        let mut solver = self.solver.clone();
        solver.seed = self.seed;
        solver.validate().map_err(|e| match e {
            Error::Config { field, message } => Error::Config {
                field: format!("solver.{field}"),
                message,
            },
            e => e,
        })?;
        if let Some(tau) = self.tau {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(cfg_err("tau", "must be positive"));
            }
        }
        if matches!(self.mode, Mode::Scan | Mode::Index) && self.k_list.is_empty() {
            return Err(cfg_err("k_list", &format!("must be nonempty in {} mode", self.mode)));
        }
        if self.k_list.contains(&0) {
            return Err(cfg_err("k_list", "entries must be positive"));
        }
        let s = &self.index.schedule;
        if s.len() < 2 || s[0] == 0 || s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(cfg_err("index.schedule", "need at least two increasing positive orders"));
        }
        for (field, v) in [("index.zero_tol", self.index.zero_tol), ("index.rank_tol", self.index.rank_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(cfg_err(field, "must be positive"));
            }
        }
        if self.index.flow_steps < 2 {
            return Err(cfg_err("index.flow_steps", "must be at least 2"));
        }
        for name in &self.check.hypotheses {
            if parse_hypothesis(name).is_none() {
                return Err(cfg_err("check.hypotheses", &format!("unknown hypothesis `{name}`")));
            }
        }
        if self.check.directions == 0 {
            return Err(cfg_err("check.directions", "must be at least 1"));
        }
        if let Some(r) = &self.check.radii {
            if r.is_empty() || r.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(cfg_err("check.radii", "need positive radii"));
            }
        }
        Ok(())
    }

    /// SHA-256 of the normalized JSON form, excluding the output directory.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    fn solver_options(&self) -> SolverOptions {
        let mut o = self.solver.clone();
        o.seed = self.seed;
        o
    }
}

/// One row of the index table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexRow {
    pub k: usize,
    pub pair: IndexPair,
    pub monodromy_nullity: usize,
    pub bounds: IterationReport,
    /// Both iteration inequalities hold and the two nullities agree.
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexSummary {
    pub n: usize,
    pub tau: f64,
    pub base: IndexPair,
    pub rows: Vec<IndexRow>,
}

/// Artifacts and certificates attached to one accepted solution.
#[derive(Clone, Debug, Serialize)]
pub struct SolutionReport {
    pub k: usize,
    pub file: String,
    pub samples_file: Option<String>,
    pub minimal_period: Option<MinimalPeriodVerdict>,
    pub minimal_period_note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistinctnessReport {
    pub k: usize,
    pub pk: usize,
    pub verdict: Option<DistinctnessVerdict>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveSummary {
    pub entries: Vec<ScanEntry>,
    pub solutions: Vec<SolutionReport>,
    pub distinctness: Vec<DistinctnessReport>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
}

/// The content of `summary.json`.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub tool: String,
    pub version: String,
    pub mode: Mode,
    pub seed: u64,
    pub config_sha256: String,
    pub status: Status,
    pub error: Option<String>,
    pub index: Option<IndexSummary>,
    pub solve: Option<SolveSummary>,
    pub check: Option<HypothesisReport>,
}

impl Summary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ManifestFile {
    pub name: String,
    pub sha256: String,
}

/// The content of `manifest.json`.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub mode: Mode,
    pub seed: u64,
    pub config_sha256: String,
    pub config: RunConfig,
    pub files: Vec<ManifestFile>,
}

/// What [`run`] produced.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub summary: Summary,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    pub fn ok(&self) -> bool {
        self.summary.status == Status::Ok
    }
}

struct Writer {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Writer {
    fn write(&mut self, name: &str, content: &str) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, content)?;
        self.files.push((name.to_string(), hex::encode(Sha256::digest(content.as_bytes()))));
        Ok(())
    }
}

/// Executes the configured pipeline and writes its artifacts to `out`, or to
/// `config.out`, or to `./linkorbit-out`. Invalid configurations and I/O
/// failures are errors; pipeline failures are recorded in the summary with
/// status `failed`, and whatever was computed before the failure is kept.
pub fn run(config: &RunConfig, out: Option<&Path>) -> Result<RunReport> {
    config.validate()?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from("linkorbit-out"));
    std::fs::create_dir_all(&dir)?;
    let mut w = Writer { dir: dir.clone(), files: vec![] };
    let hash = config.hash();
    let mut summary = Summary {
        tool: "linkorbit".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        mode: config.mode,
        seed: config.seed,
        config_sha256: hash.clone(),
        status: Status::Ok,
        error: None,
        index: None,
        solve: None,
        check: None,
    };
    let outcome = match config.mode {
        Mode::Index => run_index(config, &mut w, &mut summary),
        Mode::Solve | Mode::Scan => run_solve(config, &mut w, &mut summary),
        Mode::Check => run_check(config, &mut summary),
    };
    if let Err(e) = outcome {
        // Configuration problems found while loading inputs abort the run.
        if matches!(e, Error::Config { .. }) {
            return Err(e);
        }
        log::error!("pipeline failed: {e}");
        summary.status = Status::Failed;
        summary.error = Some(e.to_string());
    }
    w.write("summary.json", &summary.to_json())?;
    let manifest = Manifest {
        tool: summary.tool.clone(),
        version: summary.version.clone(),
        mode: config.mode,
        seed: config.seed,
        config_sha256: hash,
        config: config.clone(),
        files: w
            .files
            .iter()
            .map(|(name, sha256)| ManifestFile {
                name: name.clone(),
                sha256: sha256.clone(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    w.write("manifest.json", &text)?;
    let files = w.files.iter().map(|(n, _)| dir.join(n)).collect();
    Ok(RunReport {
        summary,
        out_dir: dir,
        files,
    })
}

fn run_index(config: &RunConfig, w: &mut Writer, summary: &mut Summary) -> Result<()> {
    let path = config.model.linear(config.base_dir.as_deref())?;
    if let Some(tau) = config.tau {
        if (tau - path.period()).abs() > 1e-9 * tau {
            return Err(cfg_err(
                "tau",
                &format!("{tau} differs from the path period {}", path.period()),
            ));
        }
    }
    let opts = GalerkinOptions {
        schedule: config.index.schedule.clone(),
        zero_tol: config.index.zero_tol,
        ..GalerkinOptions::default()
    };
    use crate::symplectic::MatrixFunction;
    let n = path.half_dim();
    let (base, _) = index_pair_galerkin(&path, &opts)?;
    let gamma = fundamental_solution(&path, FlowOptions::steps(config.index.flow_steps))?;
    let mut rows = Vec::with_capacity(config.k_list.len());
    let mut all_ok = true;
    for &k in &config.k_list {
        let pair = index_pair_iterated(&path, k, &opts)?;
        let nu_m = nullity_from_monodromy(&iterate_path(&gamma, k)?, config.index.rank_tol);
        let bounds = check_iteration_bounds(&base, &pair, k)?;
        let ok = bounds.ok() && nu_m == pair.nu;
        all_ok &= ok;
        rows.push(IndexRow {
            k,
            pair,
            monodromy_nullity: nu_m,
            bounds,
            ok,
        });
    }
    let table = IndexSummary {
        n,
        tau: path.period(),
        base,
        rows,
    };
    w.write("indices.csv", &indices_csv(&table)?)?;
    summary.index = Some(table);
    if !all_ok {
        summary.status = Status::Failed;
        summary.error = Some("an iteration bound or nullity cross-check failed".into());
    }
    Ok(())
}

/// The machine-readable index table.
pub fn indices_csv(table: &IndexSummary) -> Result<String> {
    let mut c = csv::Writer::from_writer(Vec::new());
    c.write_record(["k", "i", "nu", "prop210_lo", "prop210_hi", "prop212_lo", "prop212_hi", "ok"])?;
    for r in &table.rows {
        c.write_record([
            r.k.to_string(),
            r.pair.i.to_string(),
            r.pair.nu.to_string(),
            r.bounds.basic.lower.to_string(),
            r.bounds.basic.upper.to_string(),
            r.bounds.refined.lower.to_string(),
            r.bounds.refined.upper.to_string(),
            r.ok.to_string(),
        ])?;
    }
    let bytes = c.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// The human-readable index table.
pub fn index_table(table: &IndexSummary) -> String {
    let mut s = format!(
        "base τ = {:.6}: (i, ν) = ({}, {})\n{:>4} {:>6} {:>4} {:>5} {:>17} {:>17} {:>4}\n",
        table.tau, table.base.i, table.base.nu, "k", "i", "nu", "ν_mon", "basic bounds", "refined bounds", "ok"
    );
    for r in &table.rows {
        let b = |c: &crate::index::BoundCheck| format!("[{}, {}]", c.lower, c.upper);
        writeln!(
            s,
            "{:>4} {:>6} {:>4} {:>5} {:>17} {:>17} {:>4}",
            r.k,
            r.pair.i,
            r.pair.nu,
            r.monodromy_nullity,
            b(&r.bounds.basic),
            b(&r.bounds.refined),
            if r.ok { "ok" } else { "FAIL" }
        )
        .unwrap();
    }
    s
}

fn samples_csv(z: &crate::loopspace::FourierLoop, count: usize) -> Result<String> {
    let n = z.half_dim();
    let mut c = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("p{i}")));
    header.extend((1..=n).map(|i| format!("q{i}")));
    c.write_record(&header)?;
    for j in 0..=count {
        let t = z.period() * j as f64 / count as f64;
        let mut row = vec![t.to_string()];
        row.extend(z.eval(t).iter().map(|x| x.to_string()));
        c.write_record(&row)?;
    }
    let bytes = c.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn report_solution(
    config: &RunConfig,
    model: &HamiltonianModel,
    w: &mut Writer,
    r: &SaddleResult,
    j: usize,
) -> Result<SolutionReport> {
    let file = format!("solutions/k{}_{j}.csv", r.k);
    w.write(&file, &r.z.to_csv_string()?)?;
    let samples_file = if config.plot_samples > 0 {
        let name = format!("solutions/k{}_{j}_samples.csv", r.k);
        w.write(&name, &samples_csv(&r.z, config.plot_samples)?)?;
        Some(name)
    } else {
        None
    };
    let (minimal_period, minimal_period_note) = match minimal_period_check(r, model) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(SolutionReport {
        k: r.k,
        file,
        samples_file,
        minimal_period,
        minimal_period_note,
    })
}

fn run_solve(config: &RunConfig, w: &mut Writer, summary: &mut Summary) -> Result<()> {
    let model = config.model.nonlinear(config.base_dir.as_deref())?;
    let tau = config.tau.unwrap_or(model.period());
    let opts = config.solver_options();
    let entries = match config.mode {
        Mode::Scan => subharmonic_scan(&model, tau, &config.k_list, &opts)?,
        _ => vec![solve_period(&model, tau, 1, &opts)?],
    };
    let mut solutions = vec![];
    for e in &entries {
        for (j, r) in e.results().iter().enumerate() {
            solutions.push(report_solution(config, &model, w, r, j)?);
        }
    }
    let mut distinctness = vec![];
    for a in &entries {
        for b in &entries {
            if b.k <= a.k || b.k % a.k != 0 {
                continue;
            }
            if let (Some(za), Some(zb)) = (a.results().first(), b.results().first()) {
                let (verdict, error) = match distinctness_check(za, zb, b.k / a.k, model.half_dim()) {
                    Ok(v) => (Some(v), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                distinctness.push(DistinctnessReport {
                    k: a.k,
                    pk: b.k,
                    verdict,
                    error,
                });
            }
        }
    }
    let found = entries.iter().any(|e| !e.results().is_empty());
    summary.solve = Some(SolveSummary {
        entries,
        solutions,
        distinctness,
    });
    if !found {
        summary.status = Status::Failed;
        summary.error = Some("no accepted solution".into());
    }
    Ok(())
}

fn run_check(config: &RunConfig, summary: &mut Summary) -> Result<()> {
    let model = config.model.nonlinear(config.base_dir.as_deref())?;
    let which: Vec<Hypothesis> = config.check.hypotheses.iter().filter_map(|h| parse_hypothesis(h)).collect();
    let mut spec = SamplingSpec {
        directions: config.check.directions,
        ..SamplingSpec::default()
    };
    if let Some(r) = &config.check.radii {
        spec.radii = r.clone();
    }
    let report = check_hypotheses(&model, &which, &spec);
    if !report.all_passed() {
        summary.status = Status::Failed;
        summary.error = Some("a hypothesis check did not pass".into());
    }
    summary.check = Some(report);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_carry_lines() {
        let e = RunConfig::from_toml_str("mode = \"index\"\n\nbogus = 3\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = RunConfig::from_json_str("{\n\"mode\": 5\n}").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
    }

    #[test]
    fn scan_needs_k_list() {
        let cfg = RunConfig::from_toml_str("mode = \"scan\"\nk_list = []\n").unwrap();
        match cfg.validate().unwrap_err() {
            Error::Config { field, .. } => assert_eq!(field, "k_list"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn field_errors_are_named() {
        let bad = [
            ("[solver]\ntol = -1.0\n", "solver.tol"),
            ("[index]\nschedule = [16]\n", "index.schedule"),
            ("[check]\nhypotheses = [\"H9\"]\n", "check.hypotheses"),
            ("[model]\nkind = \"example_anisotropic\"\nn = 2\nsigma = [1.0]\ntau_exp = [1.0, 1.0]\n", "model.sigma"),
            ("[model]\nkind = \"linear\"\npath = {}\n", "model.path"),
            ("tau = 0.0\n", "tau"),
        ];
        for (text, want) in bad {
            match RunConfig::from_toml_str(text).unwrap().validate() {
                Err(Error::Config { field, .. }) => assert_eq!(field, want, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn json_and_toml_agree() {
        let t = RunConfig::from_toml_str(
            "mode = \"index\"\nk_list = [1, 2]\n[model]\nkind = \"linear\"\npath = { constant = 0.5 }\n",
        )
        .unwrap();
        let j = RunConfig::from_json_str(
            r#"{"mode": "index", "k_list": [1, 2], "model": {"kind": "linear", "path": {"constant": 0.5}}}"#,
        )
        .unwrap();
        assert_eq!(t, j);
        assert_eq!(t.hash(), j.hash());
        let mut other = t.clone();
        other.seed += 1;
        assert_ne!(t.hash(), other.hash());
        let mut moved = t.clone();
        moved.out = Some("elsewhere".into());
        assert_eq!(t.hash(), moved.hash());
    }

    #[test]
    fn hypothesis_names() {
        assert_eq!(parse_hypothesis("h3'"), Some(Hypothesis::H3Prime));
        assert_eq!(parse_hypothesis("C4"), Some(Hypothesis::C4));
        assert_eq!(parse_hypothesis("H6"), None);
    }
}
