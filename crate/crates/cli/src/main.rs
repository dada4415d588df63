use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use linkorbit::run::{index_table, run, Mode, ModelSpec, PathSpec, RunConfig, RunReport};

/// Maslov-type indices and linking orbits of Hamiltonian systems.
#[derive(Parser, Debug)]
#[command(name = "linkorbit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Run configuration (TOML, or JSON with a `.json` extension).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Galerkin truncation order; overrides the config.
    #[arg(long)]
    modes: Option<usize>,
    /// More logging; repeat for debug output.
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Index pairs of a linear periodic system and its iterates.
    Index {
        #[command(flatten)]
        common: Common,
        /// Matrix-series file holding B(t).
        #[arg(long, conflicts_with = "constant")]
        path: Option<PathBuf>,
        /// Use B ≡ b·I instead of a file.
        #[arg(long)]
        constant: Option<f64>,
        /// Half-dimension for --constant.
        #[arg(long, requires = "constant")]
        n: Option<usize>,
        /// Base period τ.
        #[arg(long)]
        period: Option<f64>,
        /// Report k = 1..=K.
        #[arg(long)]
        iterates: Option<usize>,
    },
    /// One nonconstant orbit at period τ.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Orbits at periods kτ and their distinctness.
    Scan {
        #[command(flatten)]
        common: Common,
        /// Period multipliers, e.g. 1,2,4.
        #[arg(long, value_delimiter = ',')]
        k_list: Option<Vec<usize>>,
    },
    /// Hypothesis checks on the configured model.
    Check {
        #[command(flatten)]
        common: Common,
    },
}

fn build_config(cmd: &Command) -> anyhow::Result<(RunConfig, &Common)> {
    let (mode, common) = match cmd {
        Command::Index { common, .. } => (Mode::Index, common),
        Command::Solve { common } => (Mode::Solve, common),
        Command::Scan { common, .. } => (Mode::Scan, common),
        Command::Check { common } => (Mode::Check, common),
    };
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if common.config.is_some() && cfg.mode != mode {
        log::warn!("config mode `{}` replaced by subcommand `{mode}`", cfg.mode);
    }
    cfg.mode = mode;
    match cmd {
        Command::Index {
            path,
            constant,
            n,
            period,
            iterates,
            ..
        } => {
            if path.is_some() || constant.is_some() {
                let spec = PathSpec {
                    file: path.clone(),
                    constant: *constant,
                    n: *n,
                    period: if constant.is_some() { *period } else { None },
                };
                cfg.model = ModelSpec::Linear { path: spec };
                if path.is_some() {
                    cfg.base_dir = None;
                }
            }
            if period.is_some() {
                cfg.tau = *period;
            }
            if let Some(k) = iterates {
                cfg.k_list = (1..=*k).collect();
            }
        }
        Command::Scan { k_list: Some(k), .. } => cfg.k_list = k.clone(),
        _ => {}
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(m) = common.modes {
        cfg.set_modes(m);
    }
    Ok((cfg, common))
}

fn print_report(report: &RunReport) {
    let s = &report.summary;
    if let Some(table) = &s.index {
        print!("{}", index_table(table));
    }
    if let Some(solve) = &s.solve {
        for e in &solve.entries {
            if let Some(err) = &e.error {
                println!("k = {}: {err}", e.k);
            }
            for r in e.results() {
                let maslov = r.maslov.map_or("n/a".to_string(), |p| format!("({}, {})", p.i, p.nu));
                println!(
                    "k = {}: value {:.6e}, residual {:.2e}, sup|z| {:.4}, index {maslov}, window {}",
                    r.k,
                    r.value,
                    r.residual,
                    r.sup_norm,
                    if r.window_ok { "ok" } else { "violated" }
                );
            }
            if e.results().is_empty() && e.error.is_none() {
                println!("k = {}: no accepted solution ({} seeds failed)", e.k, e.search.failures.len());
            }
        }
        for d in &solve.distinctness {
            match (&d.verdict, &d.error) {
                (Some(v), _) => println!("z_{} vs z_{}: {} (shift gap {:.3e})", d.k, d.pk, v.message, v.shift_gap),
                (None, Some(e)) => println!("z_{} vs z_{}: {e}", d.k, d.pk),
                _ => {}
            }
        }
    }
    if let Some(check) = &s.check {
        for v in &check.verdicts {
            println!("{}: {:?}", v.hypothesis, v.status);
        }
    }
    if let Some(e) = &s.error {
        eprintln!("run failed: {e}");
    }
    println!("artifacts in {}", report.out_dir.display());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verbose = match &cli.command {
        Command::Index { common, .. }
        | Command::Solve { common }
        | Command::Scan { common, .. }
        | Command::Check { common } => common.verbose,
    };
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let (cfg, common) = match build_config(&cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg, common.out.as_deref()) {
        Ok(report) => {
            print_report(&report);
            if report.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
