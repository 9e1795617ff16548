//! Plug-in estimate of the covariance contrast matrix `H = A⁻¹B`.
//!
//! `Â` is the working-model information at the QMLE and `B̂` the empirical
//! covariance of the per-observation scores. The eigenvalues of `Â⁻¹B̂` are
//! taken from the symmetric pencil `L⁻¹B̂L⁻ᵀ` (with `Â = LLᵀ`) so `Â` is never
//! inverted explicitly.

use alloc::vec::Vec;

use crate::family::GlmFamily;
use crate::glm::{working_design, FitResult};
use crate::linalg::{symmetric_eigenvalues, Cholesky, Matrix};
use crate::math::ln;
use crate::{Error, Result};

pub const DEFAULT_EIG_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ContrastEstimate {
    pub a_hat: Matrix,
    pub b_hat: Matrix,
    /// `tr(Ĥ)`.
    pub trace_h: f64,
    /// `Σ log max(λᵢ, floor)`.
    pub logdet_h: f64,
    pub min_eig_h: f64,
    /// Some eigenvalue fell below the floor.
    pub clamped: bool,
    /// Eigenvalues of `Ĥ`, ascending.
    pub eigenvalues: Vec<f64>,
}

impl ContrastEstimate {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `tr(Ĥ) − log|Ĥ|`, the misspecification term.
    pub fn misspecification(&self) -> f64 {
        self.trace_h - self.logdet_h
    }
}

fn check(design: &Matrix, beta_hat: &[f64], dispersion: f64) -> Result<()> {
    if design.ncols() != beta_hat.len() {
        return Err(Error::DimensionMismatch { expected: design.ncols(), found: beta_hat.len() });
    }
    if beta_hat.iter().any(|b| !b.is_finite()) {
        return Err(Error::NonFinite);
    }
    if !(dispersion > 0.0) || !dispersion.is_finite() {
        return Err(Error::InvalidDispersion);
    }
    Ok(())
}

/// `Â = XᵀΣ(Xβ̂)X`, divided by the dispersion for the Gaussian family.
pub fn estimate_a(family: GlmFamily, design: &Matrix, beta_hat: &[f64], dispersion: f64) -> Result<Matrix> {
    check(design, beta_hat, dispersion)?;
    let theta = design.mul_vec(beta_hat);
    let weights: Vec<f64> = match family {
        GlmFamily::Gaussian => theta.iter().map(|_| 1.0 / dispersion).collect(),
        GlmFamily::BernoulliLogit => theta.iter().map(|&t| family.variance(t)).collect(),
    };
    Ok(design.weighted_gram(&weights))
}

/// `B̂ = Xᵀdiag(r ∘ r)X` with `r = y − μ(Xβ̂)`, divided by the squared
/// dispersion for the Gaussian family.
pub fn estimate_b(
    family: GlmFamily,
    design: &Matrix,
    response: &[f64],
    beta_hat: &[f64],
    dispersion: f64,
) -> Result<Matrix> {
    check(design, beta_hat, dispersion)?;
    if response.len() != design.nrows() {
        return Err(Error::DimensionMismatch { expected: design.nrows(), found: response.len() });
    }
    let theta = design.mul_vec(beta_hat);
    let scale = match family {
        GlmFamily::Gaussian => 1.0 / (dispersion * dispersion),
        GlmFamily::BernoulliLogit => 1.0,
    };
    let weights: Vec<f64> = theta
        .iter()
        .zip(response)
        .map(|(&t, &y)| {
            let r = y - family.mean(t);
            r * r * scale
        })
        .collect();
    Ok(design.weighted_gram(&weights))
}

/// Trace and floored log-determinant of `Â⁻¹B̂`.
pub fn contrast_summary(a_hat: &Matrix, b_hat: &Matrix, eig_floor: f64) -> Result<ContrastEstimate> {
    let d = a_hat.nrows();
    if a_hat.ncols() != d || b_hat.nrows() != d || b_hat.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: b_hat.nrows() });
    }
    if !(eig_floor > 0.0) {
        return Err(Error::InvalidConfig("eig_floor must be positive"));
    }
    if !a_hat.is_finite() || !b_hat.is_finite() {
        return Err(Error::NonFinite);
    }
    let chol = Cholesky::new(a_hat).ok_or(Error::NotPositiveDefinite)?;
    let eigenvalues = symmetric_eigenvalues(&chol.whiten(b_hat));
    let trace_h = eigenvalues.iter().sum();
    let logdet_h = eigenvalues.iter().map(|&l| ln(l.max(eig_floor))).sum();
    let min_eig_h = eigenvalues.first().copied().unwrap_or(f64::INFINITY);
    let clamped = eigenvalues.iter().any(|&l| l < eig_floor);
    Ok(ContrastEstimate {
        a_hat: a_hat.clone(),
        b_hat: b_hat.clone(),
        trace_h,
        logdet_h,
        min_eig_h,
        clamped,
        eigenvalues,
    })
}

/// `Â`, `B̂` and their summary for a fitted candidate, on its working design.
pub fn estimate_for_fit(
    family: GlmFamily,
    design_sub: &Matrix,
    response: &[f64],
    fit: &FitResult,
    eig_floor: f64,
) -> Result<ContrastEstimate> {
    let x = working_design(design_sub, fit.intercept.is_some());
    let coef = fit.working_coefficients();
    let a = estimate_a(family, &x, &coef, fit.dispersion_hat)?;
    let b = estimate_b(family, &x, response, &coef, fit.dispersion_hat)?;
    contrast_summary(&a, &b, eig_floor)
}
