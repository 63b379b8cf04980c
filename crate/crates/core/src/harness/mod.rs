//! Experiment drivers: configuration, runs, self-checks and artifact writers.

pub mod checks;
pub mod config;
pub mod convergence;
pub mod evolve_run;
pub mod kernel_study;
pub mod norms;
pub mod output;
pub mod profiles;

pub use checks::{run_checks, CheckHooks, CheckResult};
pub use config::{Bump, DtPolicy, ExperimentConfig, InitialDatum, PairSpec};
pub use convergence::{
    run_convergence, ConvergenceReport, DtCheck, Envelope, LevelResult, RateFit, DT_CHECK_LIMIT, MIN_FIT_LEVELS,
    PREASYMPTOTIC_FRACTION,
};
pub use evolve_run::{conservation_log, run_evolve, ConservationRow, EvolveReport, EvolveRun};
pub use kernel_study::{run_kernel_study, KernelFitRow, KernelReport};
pub use norms::{run_norms, NormRow, NormsReport, StrichartzRow};
pub use profiles::build_datum;

use crate::error::{Error, Result};

/// Runs `job` on a dedicated pool of `workers` threads.
pub(crate) fn in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(job))
}
