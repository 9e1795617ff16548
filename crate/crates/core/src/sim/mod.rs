//! Monte Carlo benchmark: data generation, replicated selection runs, metrics.

pub mod experiment;
pub mod metrics;
pub mod pseudo_true;
pub mod rng;
pub mod scenario;

pub use experiment::{
    aggregate, aggregate_sweep, run_experiment, run_replication, zeta_sweep, CriterionOutcome, CriterionSummary,
    MeanSe, MetricsReport, ReplicationOutcome, SimulationConfig, ZetaPoint,
};
pub use metrics::{compute_metrics, ReplicationMetrics, SelectionScore};
pub use pseudo_true::estimate_pseudo_true;
pub use scenario::{generate_logistic_interaction, generate_multiple_index, Scenario, TestSample, TrueModelSpec};
