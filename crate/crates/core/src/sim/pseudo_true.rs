//! Population version of the score equation, `Xᵀ[EY − μ(Xβ)] = 0`.

use alloc::vec::Vec;

use crate::family::GlmFamily;
use crate::glm::{check_rank, solve_score_equation, FitOptions};
use crate::linalg::Matrix;
use crate::{Error, Result};

/// Tolerance per observation on the population score; far tighter than the
/// one used for sample fits since `EY` is exact.
const PSEUDO_TRUE_TOL_PER_OBS: f64 = 1e-13;

/// Pseudo-true parameter of the working model on `design_sub` given the true
/// conditional means.
pub fn estimate_pseudo_true(family: GlmFamily, design_sub: &Matrix, mean_response: &[f64]) -> Result<Vec<f64>> {
    let n = design_sub.nrows();
    if mean_response.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: mean_response.len() });
    }
    if !design_sub.is_finite() || mean_response.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let opts = FitOptions { score_tol_per_obs: PSEUDO_TRUE_TOL_PER_OBS, ..FitOptions::default() };
    let qr = check_rank(design_sub, opts.rank_tol)?;
    match family {
        GlmFamily::Gaussian => Ok(qr.solve_least_squares(mean_response)),
        GlmFamily::BernoulliLogit => {
            if mean_response.iter().any(|&m| !(0.0..=1.0).contains(&m)) {
                return Err(Error::InvalidResponse {
                    index: mean_response.iter().position(|&m| !(0.0..=1.0).contains(&m)).unwrap_or(0),
                    family: family.name(),
                });
            }
            let sol = solve_score_equation(family, design_sub, mean_response, None, &opts)?;
            if !sol.converged {
                return Err(Error::NotConverged { score: sol.score_sup_norm });
            }
            Ok(sol.beta)
        }
    }
}
