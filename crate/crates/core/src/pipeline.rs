//! Candidate generation, refitting, contrast estimation and selection for one
//! dataset.

use alloc::vec::Vec;

use crate::contrast::{estimate_for_fit, ContrastEstimate, DEFAULT_EIG_FLOOR};
use crate::criteria::{evaluate, select, CriterionKind, CriterionValue, SelectionResult};
use crate::data::{Dataset, ModelSupport};
use crate::family::GlmFamily;
use crate::glm::{FitOptions, FitResult};
use crate::path::{compute_path, refit_candidates, CandidateSequence, LassoPathConfig};
use crate::{Error, Result};

/// Why a candidate was excluded from every argmin.
#[derive(Debug, Clone, PartialEq)]
pub enum Rejection {
    RankDeficient,
    FitFailed(Error),
    NotConverged,
    ContrastFailed(Error),
}

impl core::fmt::Display for Rejection {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Rejection::RankDeficient => f.write_str("rank_deficient"),
            Rejection::FitFailed(e) => write!(f, "fit_failed: {e}"),
            Rejection::NotConverged => f.write_str("not_converged"),
            Rejection::ContrastFailed(e) => write!(f, "contrast_failed: {e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssessedCandidate {
    pub support: ModelSupport,
    pub fit: Option<FitResult>,
    pub contrast: Option<ContrastEstimate>,
    pub rejection: Option<Rejection>,
}

impl AssessedCandidate {
    pub fn is_rejected(&self) -> bool {
        self.rejection.is_some()
    }
}

/// Options for candidate generation and refitting.
///
/// The default refits treat the Gaussian dispersion as known and equal to
/// one, so `−2ℓ` is the residual sum of squares and `Â`, `B̂` carry no
/// dispersion factors. Set `fit.dispersion = None` to profile `σ̂² = RSS/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    pub path: LassoPathConfig,
    pub fit: FitOptions,
    pub eig_floor: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            path: LassoPathConfig::default(),
            fit: FitOptions { dispersion: Some(1.0), ..FitOptions::default() },
            eig_floor: DEFAULT_EIG_FLOOR,
        }
    }
}

impl PipelineOptions {
    /// Fit options with the intercept setting matching the path.
    pub fn fit_options(&self, family: GlmFamily) -> FitOptions {
        self.fit.clone().with_intercept(self.path.resolved_intercept(family))
    }
}

/// Refits each support and estimates its contrast matrix.
pub fn assess_candidates(
    family: GlmFamily,
    dataset: &Dataset,
    seq: &CandidateSequence,
    fit_opts: &FitOptions,
    eig_floor: f64,
) -> Vec<AssessedCandidate> {
    refit_candidates(family, dataset, seq, fit_opts)
        .into_iter()
        .map(|c| {
            let mut out = AssessedCandidate { support: c.support, fit: None, contrast: None, rejection: None };
            match c.fit {
                Err(Error::RankDeficient { .. }) => out.rejection = Some(Rejection::RankDeficient),
                Err(e) => out.rejection = Some(Rejection::FitFailed(e)),
                Ok(fit) => {
                    if !fit.is_admissible() {
                        out.rejection = Some(Rejection::NotConverged);
                    } else {
                        let sub = dataset.design().select_columns(out.support.indices());
                        match estimate_for_fit(family, &sub, dataset.response(), &fit, eig_floor) {
                            Ok(c) => out.contrast = Some(c),
                            Err(e) => out.rejection = Some(Rejection::ContrastFailed(e)),
                        }
                    }
                    out.fit = Some(fit);
                }
            }
            out
        })
        .collect()
}

/// Criterion value per candidate; `None` for rejected ones.
pub fn criterion_values(
    kind: CriterionKind,
    candidates: &[AssessedCandidate],
    n: usize,
    p: usize,
) -> Result<Vec<Option<CriterionValue>>> {
    kind.validate()?;
    candidates
        .iter()
        .map(|c| match (&c.rejection, &c.fit, &c.contrast) {
            (None, Some(fit), Some(contrast)) => evaluate(kind, fit, contrast, n, p).map(Some),
            _ => Ok(None),
        })
        .collect()
}

/// Argmin of `kind` over the assessed candidates.
pub fn select_candidate(
    kind: CriterionKind,
    candidates: &[AssessedCandidate],
    n: usize,
    p: usize,
) -> Result<SelectionResult> {
    let values = criterion_values(kind, candidates, n, p)?;
    let sizes: Vec<usize> = candidates.iter().map(|c| c.support.len()).collect();
    select(&values, &sizes)
}

/// Path, refit and contrast for a dataset, ready for any number of criteria.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedCandidates {
    pub family: GlmFamily,
    pub n: usize,
    pub p: usize,
    pub sequence: CandidateSequence,
    pub candidates: Vec<AssessedCandidate>,
}

impl PreparedCandidates {
    pub fn build(family: GlmFamily, dataset: &Dataset, opts: &PipelineOptions) -> Result<Self> {
        let path = compute_path(family, dataset, &opts.path)?;
        let sequence = path.candidate_sequence();
        let candidates = assess_candidates(family, dataset, &sequence, &opts.fit_options(family), opts.eig_floor);
        Ok(Self { family, n: dataset.n(), p: dataset.p(), sequence, candidates })
    }

    pub fn select(&self, kind: CriterionKind) -> Result<SelectionResult> {
        select_candidate(kind, &self.candidates, self.n, self.p)
    }
}
