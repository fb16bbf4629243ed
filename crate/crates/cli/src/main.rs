use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use spin_ibr::prep::{PrepScheme, SchemeKind};
use spin_ibr::readout::ReadoutKind;
use spin_ibr_cli::config::{Command, RunConfig};
use spin_ibr_cli::grid::GridSpec;
use spin_ibr_cli::run::run;
use spin_ibr_cli::CliError;

#[derive(Parser)]
#[command(name = "spin-ibr", version, about = "Noisy spin-ensemble interferometry: bounds, sweeps and readout studies")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Noisy quantum Cramér-Rao bound curves, F_Q = N².
    NqcrbCurve(Flags),
    /// Optimal noisy classical Fisher information per readout and σ.
    CfiSweep(Flags),
    /// Outcome distributions at φ and φ + δφ for eight readout panels.
    ProbSnapshot(Flags),
    /// Hill-climb random distributions towards the noisy bound.
    OptVerify(Flags),
    /// Check random distributions never beat the noisy bound.
    BoundCert(Flags),
    /// Husimi Q function of a prepared state.
    Husimi(Flags),
    /// Populations, Fisher information and phase axis of a prepared state.
    StateReport(Flags),
}

impl Sub {
    fn split(self) -> (Command, Flags) {
        match self {
            Sub::NqcrbCurve(f) => (Command::NqcrbCurve, f),
            Sub::CfiSweep(f) => (Command::CfiSweep, f),
            Sub::ProbSnapshot(f) => (Command::ProbSnapshot, f),
            Sub::OptVerify(f) => (Command::OptVerify, f),
            Sub::BoundCert(f) => (Command::BoundCert, f),
            Sub::Husimi(f) => (Command::Husimi, f),
            Sub::StateReport(f) => (Command::StateReport, f),
        }
    }
}

/// Flags override the matching fields of `--config`.
#[derive(Args)]
struct Flags {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// OAT, TACT, TNT, CAT, QPT or QND.
    #[arg(long)]
    scheme: Option<SchemeKind>,
    /// Particle number (of the scheme, or of the distribution for opt-verify / bound-cert).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    chi_t0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Comma-separated readout ids.
    #[arg(long, value_delimiter = ',')]
    readouts: Option<Vec<ReadoutKind>>,
    /// Grid: `a,b,c`, `lin:start:stop:count` or `log:start:stop:count`.
    #[arg(long)]
    sigmas: Option<String>,
    #[arg(long)]
    phis: Option<String>,
    #[arg(long, value_delimiter = ',')]
    n_values: Option<Vec<usize>>,
    #[arg(long)]
    sigma_over_n: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    dphi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    f0: Option<f64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    max_angle: Option<f64>,
    #[arg(long)]
    trace_stride: Option<usize>,
    #[arg(long)]
    theta_points: Option<usize>,
    #[arg(long)]
    phi_points: Option<usize>,
}

fn build_config(command: Command, f: Flags) -> Result<RunConfig, CliError> {
    let mut cfg = match &f.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    match cfg.command {
        Some(c) if c != command => {
            return Err(CliError::Config(format!("config is for {c}, not {command}")));
        }
        _ => cfg.command = Some(command),
    }

    let scheme_flags = f.scheme.is_some() || f.r.is_some() || f.chi_t0.is_some() || f.delta.is_some() || f.steps.is_some();
    match command.default_scheme() {
        Some(default) if scheme_flags || f.n.is_some() => {
            let mut s: PrepScheme = cfg.scheme.take().unwrap_or(default);
            if let Some(kind) = f.scheme.filter(|k| *k != s.kind) {
                s = PrepScheme::new(kind, s.n);
            }
            s.n = f.n.unwrap_or(s.n);
            s.r = f.r.or(s.r);
            s.chi_t0 = f.chi_t0.or(s.chi_t0);
            s.delta = f.delta.or(s.delta);
            s.steps = f.steps.or(s.steps);
            cfg.scheme = Some(s);
        }
        None if scheme_flags => {
            return Err(CliError::Config(format!("{command} takes no scheme")));
        }
        _ => {}
    }
    if command.default_scheme().is_none() && f.n.is_some() {
        cfg.n = f.n;
    }

    let text = |s: Option<String>| s.map(GridSpec::Text);
    cfg.seed = f.seed.or(cfg.seed);
    cfg.out = f.out.or(cfg.out);
    cfg.readouts = f.readouts.or(cfg.readouts);
    cfg.sigmas = text(f.sigmas).or(cfg.sigmas);
    cfg.phis = text(f.phis).or(cfg.phis);
    cfg.n_values = f.n_values.or(cfg.n_values);
    cfg.sigma_over_n = text(f.sigma_over_n).or(cfg.sigma_over_n);
    cfg.sigma = f.sigma.or(cfg.sigma);
    cfg.dphi = f.dphi.or(cfg.dphi);
    cfg.f0 = f.f0.or(cfg.f0);
    cfg.iterations = f.iterations.or(cfg.iterations);
    cfg.samples = f.samples.or(cfg.samples);
    cfg.max_angle = f.max_angle.or(cfg.max_angle);
    cfg.trace_stride = f.trace_stride.or(cfg.trace_stride);
    cfg.theta_points = f.theta_points.or(cfg.theta_points);
    cfg.phi_points = f.phi_points.or(cfg.phi_points);
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (command, flags) = cli.command.split();
    if let Some(threads) = flags.threads {
        if threads == 0 {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let resolved = build_config(command, flags)?.resolve()?;
    let sidecar = run(&resolved)?;
    for file in sidecar.files.iter().chain([&format!("{command}.json")]) {
        println!("{}", resolved.out.join(file).display());
    }
    Ok(())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or_default();
            fail(CliError::Config(first.trim_start_matches("error: ").to_string()))
        }
    };
    if let Err(e) = execute(cli) {
        fail(e);
    }
}

fn fail(e: CliError) -> ! {
    let line = serde_json::json!({"error": e.kind(), "message": e.to_string()});
    eprintln!("{line}");
    std::process::exit(e.exit_code())
}
