//! Replications fanned out over a rayon pool.
//!
//! Each replication is independent and deterministic given its index, and
//! outcomes are collected in replication order before aggregation, so the
//! report does not depend on the number of workers.

use hgbic_core::sim::{self, MetricsReport, ReplicationOutcome, SimulationConfig, ZetaPoint};
use rayon::prelude::*;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Core(#[from] hgbic_core::Error),
}

pub fn run_replications(config: &SimulationConfig, workers: usize) -> Result<Vec<ReplicationOutcome>, RunError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    let outcomes = pool.install(|| {
        (0..config.n_reps).into_par_iter().map(|r| sim::run_replication(config, r)).collect::<Result<Vec<_>, _>>()
    })?;
    Ok(outcomes)
}

pub fn run_experiment(config: &SimulationConfig, workers: usize) -> Result<MetricsReport, RunError> {
    Ok(sim::aggregate(config, &run_replications(config, workers)?)?)
}

/// `ζ` sweep; only the grid is evaluated, so no test sets are drawn.
pub fn zeta_sweep(config: &SimulationConfig, workers: usize) -> Result<Vec<ZetaPoint>, RunError> {
    let sweep_only = SimulationConfig { criteria: Vec::new(), ..config.clone() };
    Ok(sim::aggregate_sweep(&sweep_only, &run_replications(&sweep_only, workers)?)?)
}

/// Worker count when neither the flag nor the environment sets one.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
