//! Replicated selection experiments and their aggregation.
//!
//! A replication is a pure function of `(config, r)`; parallel drivers map
//! [`run_replication`] over `0..n_reps` in any order and hand the outcomes,
//! ordered by `r`, to [`aggregate`] or [`aggregate_sweep`].

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::metrics::{score_selection, test_error, SelectionScore};
use super::rng::replication_seed;
use super::scenario::{generate, Scenario, Split, TestSample, TrueModelSpec};
use crate::criteria::CriterionKind;
use crate::data::ModelSupport;
use crate::glm::{fit_support, FitResult};
use crate::math::sqrt;
use crate::pipeline::{PipelineOptions, PreparedCandidates};
use crate::{Error, Result};

pub const DEFAULT_TEST_SIZE: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub p: usize,
    pub n_reps: usize,
    pub base_seed: u64,
    pub criteria: Vec<CriterionKind>,
    pub zeta_grid: Option<Vec<f64>>,
    pub test_size: usize,
    pub pipeline: PipelineOptions,
}

impl SimulationConfig {
    pub fn new(scenario: Scenario, n: usize, p: usize, n_reps: usize, base_seed: u64) -> Self {
        Self {
            scenario,
            n,
            p,
            n_reps,
            base_seed,
            criteria: CriterionKind::STANDARD.to_vec(),
            zeta_grid: None,
            test_size: DEFAULT_TEST_SIZE,
            pipeline: PipelineOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_reps == 0 {
            return Err(Error::InvalidConfig("n_reps must be at least 1"));
        }
        if self.p < super::scenario::SIGNAL_SIZE {
            return Err(Error::InvalidConfig("p must be at least 5"));
        }
        if self.n < 2 {
            return Err(Error::InvalidConfig("n must be at least 2"));
        }
        if self.test_size == 0 {
            return Err(Error::InvalidConfig("test_size must be positive"));
        }
        for kind in &self.criteria {
            kind.validate()?;
        }
        if let Some(grid) = &self.zeta_grid {
            for &z in grid {
                CriterionKind::HgbicPZeta(z).validate()?;
            }
        }
        self.pipeline.path.validate(self.n)
    }

    pub fn zeta_criteria(&self) -> Vec<CriterionKind> {
        self.zeta_grid.iter().flatten().map(|&z| CriterionKind::HgbicPZeta(z)).collect()
    }
}

/// What one criterion did in one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub selected: ModelSupport,
    pub selection: SelectionScore,
    /// Test-set error of the selected model; absent for selection-only runs.
    pub test_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationOutcome {
    pub replication: usize,
    pub seed: u64,
    /// One entry per configured criterion; `Err` marks a failed selection.
    pub criteria: Vec<core::result::Result<CriterionOutcome, Error>>,
    /// One entry per `zeta_grid` value.
    pub zeta: Vec<core::result::Result<CriterionOutcome, Error>>,
    pub oracle_error: Option<core::result::Result<f64, Error>>,
    pub n_candidates: usize,
}

fn select_outcome(
    prepared: &core::result::Result<PreparedCandidates, Error>,
    kind: CriterionKind,
    oracle: &ModelSupport,
) -> core::result::Result<(CriterionOutcome, FitResult), Error> {
    let prepared = prepared.as_ref().map_err(Clone::clone)?;
    let sel = prepared.select(kind)?;
    let cand = &prepared.candidates[sel.chosen_index];
    let fit = cand.fit.clone().ok_or(Error::AllCandidatesRejected)?;
    let outcome = CriterionOutcome {
        selected: cand.support.clone(),
        selection: score_selection(&cand.support, oracle),
        test_error: None,
    };
    Ok((outcome, fit))
}

/// Runs replication `r`: generate, build candidates once, select under every
/// configured criterion and every grid `ζ`, then score the configured
/// criteria and the oracle model on a fresh test sample.
pub fn run_replication(config: &SimulationConfig, r: usize) -> Result<ReplicationOutcome> {
    let spec = TrueModelSpec::for_scenario(config.scenario, config.p)?;
    let seed = replication_seed(config.base_seed, r as u64);
    let family = config.scenario.working_family();
    let train = generate(&spec, config.n, seed, Split::Train)?;
    let prepared = PreparedCandidates::build(family, &train, &config.pipeline);
    let n_candidates = prepared.as_ref().map_or(0, |p| p.candidates.len());
    let oracle = &spec.oracle_support;

    let selected: Vec<_> = config.criteria.iter().map(|&k| select_outcome(&prepared, k, oracle)).collect();
    let zeta =
        config.zeta_criteria().into_iter().map(|k| select_outcome(&prepared, k, oracle).map(|(o, _)| o)).collect();

    if config.criteria.is_empty() {
        return Ok(ReplicationOutcome {
            replication: r,
            seed,
            criteria: Vec::new(),
            zeta,
            oracle_error: None,
            n_candidates,
        });
    }

    let oracle_fit = fit_support(family, &train, oracle, &config.pipeline.fit_options(family));
    let mut needed: BTreeSet<usize> = oracle.indices().iter().copied().collect();
    for (outcome, _) in selected.iter().flatten() {
        needed.extend(outcome.selected.indices());
    }
    let test = TestSample::draw(&spec, config.test_size, seed, needed)?;

    let oracle_error = Some(oracle_fit.and_then(|fit| test_error(&fit, &test, config.scenario)));
    let criteria = selected
        .into_iter()
        .map(|res| {
            let (mut outcome, fit) = res?;
            outcome.test_error = Some(test_error(&fit, &test, config.scenario)?);
            Ok(outcome)
        })
        .collect();
    Ok(ReplicationOutcome { replication: r, seed, criteria, zeta, oracle_error, n_candidates })
}

/// Sample mean and standard error of the mean, accumulated in input order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
    pub count: usize,
}

impl MeanSe {
    pub fn of(values: &[f64]) -> Self {
        let count = values.len();
        if count == 0 {
            return Self { mean: f64::NAN, se: f64::NAN, count };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let se = if count > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            sqrt(ss / (count - 1) as f64 / count as f64)
        } else {
            0.0
        };
        Self { mean, se, count }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionSummary {
    pub kind: CriterionKind,
    /// Fraction of all replications; failures count as inconsistent.
    pub consistent_rate: f64,
    /// Fraction of all replications; failures count as not sure.
    pub sure_rate: f64,
    /// Test error over successful replications.
    pub error: MeanSe,
    pub mean_false_positives: f64,
    pub mean_fdp: f64,
    pub mean_tpr: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaPoint {
    pub zeta: f64,
    pub mean_fdp: f64,
    pub mean_tpr: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub scenario: Scenario,
    pub n: usize,
    pub p: usize,
    pub n_reps: usize,
    pub criteria: Vec<CriterionSummary>,
    /// Test error of the working model fitted on the true support.
    pub oracle: Option<MeanSe>,
    pub oracle_failures: usize,
    pub fdp_tpr_curve: Option<Vec<ZetaPoint>>,
}

fn summarize<'a>(
    kind: CriterionKind,
    n_reps: usize,
    outcomes: impl Iterator<Item = &'a core::result::Result<CriterionOutcome, Error>>,
) -> CriterionSummary {
    let (mut consistent, mut sure, mut failures) = (0usize, 0usize, 0usize);
    let (mut fp, mut fdp, mut tpr) = (0.0, 0.0, 0.0);
    let mut errors = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(o) => {
                consistent += o.selection.consistent as usize;
                sure += o.selection.sure as usize;
                fp += o.selection.false_positives as f64;
                fdp += o.selection.fdp;
                tpr += o.selection.tpr;
                errors.extend(o.test_error);
            }
            Err(_) => failures += 1,
        }
    }
    let ok = (n_reps - failures) as f64;
    let avg = |s: f64| if ok > 0.0 { s / ok } else { f64::NAN };
    CriterionSummary {
        kind,
        consistent_rate: consistent as f64 / n_reps as f64,
        sure_rate: sure as f64 / n_reps as f64,
        error: MeanSe::of(&errors),
        mean_false_positives: avg(fp),
        mean_fdp: avg(fdp),
        mean_tpr: avg(tpr),
        failures,
    }
}

fn curve(config: &SimulationConfig, outcomes: &[ReplicationOutcome]) -> Option<Vec<ZetaPoint>> {
    let grid = config.zeta_grid.as_ref()?;
    let points = grid
        .iter()
        .enumerate()
        .map(|(k, &zeta)| {
            let s = summarize(CriterionKind::HgbicPZeta(zeta), outcomes.len(), outcomes.iter().map(|o| &o.zeta[k]));
            ZetaPoint { zeta, mean_fdp: s.mean_fdp, mean_tpr: s.mean_tpr, failures: s.failures }
        })
        .collect();
    Some(points)
}

/// Folds outcomes, which must be ordered by replication index, into a report.
pub fn aggregate(config: &SimulationConfig, outcomes: &[ReplicationOutcome]) -> Result<MetricsReport> {
    if outcomes.len() != config.n_reps {
        return Err(Error::DimensionMismatch { expected: config.n_reps, found: outcomes.len() });
    }
    if outcomes.iter().enumerate().any(|(r, o)| o.replication != r) {
        return Err(Error::InvalidConfig("outcomes must be ordered by replication"));
    }
    let criteria = config
        .criteria
        .iter()
        .enumerate()
        .map(|(k, &kind)| summarize(kind, outcomes.len(), outcomes.iter().map(|o| &o.criteria[k])))
        .collect();
    let oracle_errors: Vec<f64> = outcomes.iter().filter_map(|o| o.oracle_error.clone()?.ok()).collect();
    let oracle_failures = outcomes.iter().filter(|o| matches!(o.oracle_error, Some(Err(_)))).count();
    let oracle = (!config.criteria.is_empty()).then(|| MeanSe::of(&oracle_errors));
    Ok(MetricsReport {
        scenario: config.scenario,
        n: config.n,
        p: config.p,
        n_reps: config.n_reps,
        criteria,
        oracle,
        oracle_failures,
        fdp_tpr_curve: curve(config, outcomes),
    })
}

/// `(ζ, mean FDP, mean TPR)` per grid point from ordered outcomes.
pub fn aggregate_sweep(config: &SimulationConfig, outcomes: &[ReplicationOutcome]) -> Result<Vec<ZetaPoint>> {
    if config.zeta_grid.as_ref().is_none_or(|g| g.is_empty()) {
        return Err(Error::InvalidConfig("zeta_grid must be nonempty"));
    }
    Ok(aggregate(config, outcomes)?.fdp_tpr_curve.unwrap_or_default())
}

fn run_all(config: &SimulationConfig) -> Result<Vec<ReplicationOutcome>> {
    config.validate()?;
    (0..config.n_reps).map(|r| run_replication(config, r)).collect()
}

/// Sequential experiment driver.
pub fn run_experiment(config: &SimulationConfig) -> Result<MetricsReport> {
    aggregate(config, &run_all(config)?)
}

/// Sequential `ζ` sweep; candidate fits are shared across the grid within
/// each replication.
pub fn zeta_sweep(config: &SimulationConfig) -> Result<Vec<ZetaPoint>> {
    let sweep_only = SimulationConfig { criteria: Vec::new(), ..config.clone() };
    aggregate_sweep(&sweep_only, &run_all(&sweep_only)?)
}
