//! Information criteria and argmin selection.
//!
//! Every criterion is `−2ℓ̂ + complexity + misspecification` where the
//! complexity term is a per-parameter rate times `|𝔐|` and the
//! misspecification term is a function of the contrast eigenvalues. All logs
//! are natural. The classical and generalized baselines are expressed with
//! the same [`CriterionFormula`] so alternative definitions can be swapped in.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::contrast::ContrastEstimate;
use crate::glm::FitResult;
use crate::math::ln;
use crate::{Error, Result};

/// Per-parameter rate of the complexity penalty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComplexityRate {
    /// Fixed rate per parameter (AIC uses 2).
    Constant(f64),
    /// `log n`.
    LogN,
    /// `2 log(p √n)`.
    TwoLogPStar,
    /// No explicit dimension penalty.
    Zero,
}

impl ComplexityRate {
    pub fn rate(self, n: usize, p: usize) -> f64 {
        match self {
            ComplexityRate::Constant(c) => c,
            ComplexityRate::LogN => ln(n as f64),
            ComplexityRate::TwoLogPStar => 2.0 * (ln(p as f64) + 0.5 * ln(n as f64)),
            ComplexityRate::Zero => 0.0,
        }
    }
}

/// Term built from the contrast estimate `Ĥ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MisspecificationTerm {
    None,
    /// `2 tr(Ĥ)`.
    TwiceTrace,
    /// `−log|Ĥ|`.
    NegLogDet,
    /// `tr(Ĥ) − log|Ĥ|`.
    TraceMinusLogDet,
}

impl MisspecificationTerm {
    pub fn value(self, trace_h: f64, logdet_h: f64) -> f64 {
        match self {
            MisspecificationTerm::None => 0.0,
            MisspecificationTerm::TwiceTrace => 2.0 * trace_h,
            MisspecificationTerm::NegLogDet => -logdet_h,
            MisspecificationTerm::TraceMinusLogDet => trace_h - logdet_h,
        }
    }
}

/// `−2ℓ̂ + scale · [rate · d + misspecification]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionFormula {
    pub rate: ComplexityRate,
    pub misspecification: MisspecificationTerm,
    pub scale: f64,
}

impl CriterionFormula {
    pub fn components(&self, loglik: f64, d: usize, trace_h: f64, logdet_h: f64, n: usize, p: usize) -> Components {
        let neg2_loglik = -2.0 * loglik;
        let complexity_penalty = self.scale * (self.rate.rate(n, p) * d as f64);
        let misspec_penalty = self.scale * self.misspecification.value(trace_h, logdet_h);
        Components { neg2_loglik, complexity_penalty, misspec_penalty }
    }

    pub fn uses_contrast(&self) -> bool {
        self.misspecification != MisspecificationTerm::None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriterionKind {
    Aic,
    Bic,
    Gaic,
    Gbic,
    GbicP,
    HgbicP,
    /// HGBIC_p with both penalties scaled by `ζ > 0`.
    HgbicPZeta(f64),
}

impl CriterionKind {
    pub const STANDARD: [CriterionKind; 6] = [
        CriterionKind::Aic,
        CriterionKind::Bic,
        CriterionKind::Gaic,
        CriterionKind::Gbic,
        CriterionKind::GbicP,
        CriterionKind::HgbicP,
    ];

    pub fn formula(self) -> CriterionFormula {
        use ComplexityRate as R;
        use MisspecificationTerm as M;
        let (rate, misspecification, scale) = match self {
            CriterionKind::Aic => (R::Constant(2.0), M::None, 1.0),
            CriterionKind::Bic => (R::LogN, M::None, 1.0),
            CriterionKind::Gaic => (R::Zero, M::TwiceTrace, 1.0),
            CriterionKind::Gbic => (R::LogN, M::NegLogDet, 1.0),
            CriterionKind::GbicP => (R::LogN, M::TraceMinusLogDet, 1.0),
            CriterionKind::HgbicP => (R::TwoLogPStar, M::TraceMinusLogDet, 1.0),
            CriterionKind::HgbicPZeta(zeta) => (R::TwoLogPStar, M::TraceMinusLogDet, zeta),
        };
        CriterionFormula { rate, misspecification, scale }
    }

    pub fn validate(self) -> Result<()> {
        match self {
            CriterionKind::HgbicPZeta(z) if !(z > 0.0 && z.is_finite()) => {
                Err(Error::InvalidConfig("zeta must be positive and finite"))
            }
            _ => Ok(()),
        }
    }

    /// Stable lowercase label: `aic`, …, `hgbic_p`, `hgbic_p_zeta=<ζ>`.
    pub fn label(self) -> String {
        match self {
            CriterionKind::Aic => "aic".into(),
            CriterionKind::Bic => "bic".into(),
            CriterionKind::Gaic => "gaic".into(),
            CriterionKind::Gbic => "gbic".into(),
            CriterionKind::GbicP => "gbic_p".into(),
            CriterionKind::HgbicP => "hgbic_p".into(),
            CriterionKind::HgbicPZeta(z) => format!("hgbic_p_zeta={z}"),
        }
    }
}

impl core::str::FromStr for CriterionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s {
            "aic" => CriterionKind::Aic,
            "bic" => CriterionKind::Bic,
            "gaic" => CriterionKind::Gaic,
            "gbic" => CriterionKind::Gbic,
            "gbic_p" => CriterionKind::GbicP,
            "hgbic_p" => CriterionKind::HgbicP,
            other => {
                let zeta = other
                    .strip_prefix("hgbic_p_zeta=")
                    .and_then(|z| z.parse::<f64>().ok())
                    .ok_or(Error::InvalidConfig("unknown criterion"))?;
                CriterionKind::HgbicPZeta(zeta)
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Components {
    pub neg2_loglik: f64,
    pub complexity_penalty: f64,
    pub misspec_penalty: f64,
}

impl Components {
    pub fn total(&self) -> f64 {
        self.neg2_loglik + self.complexity_penalty + self.misspec_penalty
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionValue {
    pub kind: CriterionKind,
    pub value: f64,
    pub components: Components,
}

/// Evaluates `kind` from raw pieces.
pub fn evaluate_terms(
    kind: CriterionKind,
    loglik: f64,
    d: usize,
    trace_h: f64,
    logdet_h: f64,
    n: usize,
    p: usize,
) -> Result<CriterionValue> {
    if n < 2 || p < 1 {
        return Err(Error::InvalidProblemSize);
    }
    kind.validate()?;
    let components = kind.formula().components(loglik, d, trace_h, logdet_h, n, p);
    Ok(CriterionValue { kind, value: components.total(), components })
}

/// Evaluates `kind` for a fitted candidate. The dimension counted is the
/// support size; an intercept is never counted.
pub fn evaluate(
    kind: CriterionKind,
    fit: &FitResult,
    contrast: &ContrastEstimate,
    n: usize,
    p: usize,
) -> Result<CriterionValue> {
    if !fit.is_admissible() {
        return Err(Error::NotAdmissible);
    }
    if !(contrast.trace_h.is_finite() && contrast.logdet_h.is_finite()) && !contrast.clamped {
        return Err(Error::NonFiniteContrast);
    }
    evaluate_terms(kind, fit.loglik, fit.support.len(), contrast.trace_h, contrast.logdet_h, n, p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub chosen_index: usize,
    /// `None` marks a rejected candidate.
    pub per_candidate: Vec<Option<CriterionValue>>,
    pub tie_break_used: bool,
}

impl SelectionResult {
    pub fn chosen_value(&self) -> &CriterionValue {
        self.per_candidate[self.chosen_index].as_ref().expect("chosen candidate is never rejected")
    }
}

/// Argmin over non-rejected candidates. Exact ties go to the smaller
/// support, then to the earlier candidate.
pub fn select(values: &[Option<CriterionValue>], support_sizes: &[usize]) -> Result<SelectionResult> {
    if values.len() != support_sizes.len() {
        return Err(Error::DimensionMismatch { expected: values.len(), found: support_sizes.len() });
    }
    let admissible = || {
        values.iter().enumerate().filter_map(|(i, v)| v.as_ref().filter(|v| !v.value.is_nan()).map(|v| (i, v.value)))
    };
    let best = admissible().map(|(_, v)| v).min_by(f64::total_cmp).ok_or(Error::AllCandidatesRejected)?;
    let mut tied = admissible().filter(|&(_, v)| v == best).map(|(i, _)| i);
    let first = tied.next().expect("minimum is attained");
    let mut chosen = first;
    let mut tie_break_used = false;
    for i in tied {
        tie_break_used = true;
        if support_sizes[i] < support_sizes[chosen] {
            chosen = i;
        }
    }
    Ok(SelectionResult { chosen_index: chosen, per_candidate: values.to_vec(), tie_break_used })
}
