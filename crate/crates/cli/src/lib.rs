//! Experiment harness for `lattice-sampler`: configuration, runners and
//! CSV artifacts.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::{load_config, validate_config, Assignment, BackendChoice, Experiment, ExperimentConfig, LatticeChoice};
pub use error::{CliError, CliResult};
pub use experiments::{build_model, oracle_marginals, run_experiment, run_sample, RunReport};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "LS_THREADS";

/// Installs the global thread pool, honouring `LS_THREADS` when set.
pub fn init_threads() -> CliResult<()> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}
