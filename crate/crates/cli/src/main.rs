use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use dnls_core::harness::{
    output, run_checks, run_convergence, run_evolve, run_kernel_study, run_norms, CheckHooks, ExperimentConfig,
};
use dnls_core::Error;

/// Relative mass drift above this is treated as a broken invariant.
const MASS_DRIFT_LIMIT: f64 = 1e-11;
/// Allowed shortfall of a measured rate below `α/(1+α)`.
const RATE_SLACK: f64 = 0.05;

#[derive(Parser)]
#[command(name = "dnls", version, about = "Lattice nonlinear Schrödinger experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Output directory (overrides the config's `output_dir`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for random initial data (overrides the config).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads for parallel grid levels.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Skip the well-posedness window and enable the blow-up guard instead.
    #[arg(long, global = true)]
    unsafe_params: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve on every grid and log conserved quantities.
    Evolve { config: PathBuf },
    /// Refinement sweep against the continuum reference.
    Converge { config: PathBuf },
    /// Sup-norm decay fits of frequency-localized kernels.
    Kernel { config: PathBuf },
    /// Lattice norms and Strichartz quotients of the initial datum.
    Norms { config: PathBuf },
    /// Run the invariant suite.
    Check {
        /// Include the fractional convergence rates and the slow kernel fits.
        #[arg(long)]
        full: bool,
        /// Perturb the Fourier transform to exercise the failure path.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

enum Outcome {
    Ok,
    Violated(Vec<String>),
}

fn load(path: &Path, common: &Common) -> dnls_core::Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(path)?;
    if let Some(out) = &common.out {
        config.output_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(workers) = common.workers {
        config.workers = workers;
    }
    config.unsafe_params |= common.unsafe_params;
    config.validate()?;
    Ok(config)
}

fn report_written(paths: &[PathBuf]) {
    for p in paths {
        log::info!("wrote {}", p.display());
    }
}

fn converge(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let report = run_convergence(config)?;
    report_written(&output::write_convergence(&report, &config.output_dir)?);
    let mut broken = Vec::new();
    for level in &report.levels {
        if let Some(f) = &level.failure {
            broken.push(format!("M = {} failed: {f}", level.points_per_axis));
        } else if level.mass_drift > MASS_DRIFT_LIMIT {
            broken.push(format!("M = {} mass drift {:e}", level.points_per_axis, level.mass_drift));
        }
    }
    if let Some(rate) = report.fit_at(config.horizon).and_then(|f| f.rate) {
        println!("rate at t = {}: {rate:.4} (theory {:.4})", config.horizon, report.theory_rate);
        if rate < report.theory_rate - RATE_SLACK {
            broken.push(format!("rate {rate:.4} below {:.4}", report.theory_rate - RATE_SLACK));
        }
    }
    if !report.inversions.is_empty() {
        println!("non-monotone refinement at t = {:?}", report.inversions);
    }
    Ok(if broken.is_empty() { Outcome::Ok } else { Outcome::Violated(broken) })
}

fn evolve(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let report = run_evolve(config)?;
    report_written(&output::write_evolve(&report, &config.output_dir, &config.short_hash())?);
    let mut broken = Vec::new();
    for run in &report.runs {
        println!(
            "M = {:5}  mass drift {:.3e}  energy drift {:.3e}",
            run.points_per_axis, run.max_mass_drift, run.max_energy_drift
        );
        if run.max_mass_drift > MASS_DRIFT_LIMIT {
            broken.push(format!("M = {} mass drift {:e}", run.points_per_axis, run.max_mass_drift));
        }
    }
    Ok(if broken.is_empty() { Outcome::Ok } else { Outcome::Violated(broken) })
}

fn kernel(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let report = run_kernel_study(config)?;
    report_written(&output::write_kernel(&report, &config.output_dir)?);
    for fit in &report.fits {
        println!(
            "alpha = {:<5} N = {:<6} exponent {:.4} (expected {:.4})",
            fit.alpha, fit.n, fit.exponent, fit.expected_exponent
        );
    }
    Ok(Outcome::Ok)
}

fn norms(config: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let report = run_norms(config)?;
    report_written(&output::write_norms(&report, &config.output_dir)?);
    let d = config.dimension as f64;
    let (lo, hi) = (2.0 / (std::f64::consts::PI * d.sqrt()), d.sqrt());
    let broken: Vec<String> = report
        .rows
        .iter()
        .filter(|r| r.gradient_ratio.is_finite() && !(lo..=hi).contains(&r.gradient_ratio))
        .map(|r| format!("M = {} gradient ratio {:.4} outside [{lo:.4}, {hi:.4}]", r.points_per_axis, r.gradient_ratio))
        .collect();
    Ok(if broken.is_empty() { Outcome::Ok } else { Outcome::Violated(broken) })
}

fn check(common: &Common, full: bool, inject_fault: bool) -> anyhow::Result<Outcome> {
    let hooks = CheckHooks { spectral_scale: if inject_fault { 1.0 + 1e-6 } else { 1.0 } };
    let results = run_checks(&hooks, full)?;
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    report_written(&output::write_checks(&results, &dir)?);
    let mut broken = Vec::new();
    for c in &results {
        println!("{} {:<40} measured {:.6e}  margin {:.3e}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.measured, c.margin);
        if !c.passed {
            broken.push(c.name.clone());
        }
    }
    println!("{} of {} checks passed", results.len() - broken.len(), results.len());
    Ok(if broken.is_empty() { Outcome::Ok } else { Outcome::Violated(broken) })
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let with_config = |path: &PathBuf| load(path, &cli.common).with_context(|| format!("loading {}", path.display()));
    match &cli.command {
        Command::Evolve { config } => evolve(&with_config(config)?),
        Command::Converge { config } => converge(&with_config(config)?),
        Command::Kernel { config } => kernel(&with_config(config)?),
        Command::Norms { config } => norms(&with_config(config)?),
        Command::Check { full, inject_fault } => check(&cli.common, *full, *inject_fault),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_) | Error::Inadmissible(_) | Error::Domain(_) | Error::GridMismatch(_)) => 3,
        Some(
            Error::Divergence { .. }
            | Error::DomainTruncation { .. }
            | Error::UnderResolved { .. }
            | Error::Accuracy { .. }
            | Error::SingularMultiplier(_)
            | Error::Sampling(_),
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violated(what)) => {
            for w in what {
                eprintln!("invariant violated: {w}");
            }
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
