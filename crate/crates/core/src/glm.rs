//! Quasi-log-likelihood, score and quasi-maximum-likelihood fitting of a
//! working GLM on a fixed support.
//!
//! The working model need not be the data-generating one: the estimator
//! maximizes `ℓ(β) = yᵀXβ − 1ᵀb(Xβ) + Σ c(yᵢ, τ)` regardless, and its limit is
//! the parameter that solves the population score equation.

use alloc::vec;
use alloc::vec::Vec;

use crate::data::{Dataset, ModelSupport};
use crate::family::GlmFamily;
use crate::linalg::{sup_norm, Cholesky, Matrix, Qr};
use crate::math::abs;
use crate::{Error, Result};

/// Options for [`fit_qmle`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub max_iter: usize,
    /// Convergence threshold on `‖score‖∞` per observation; the effective
    /// tolerance is `score_tol_per_obs * n`.
    pub score_tol_per_obs: f64,
    /// Bound on `‖Xβ‖∞` enforced during the Newton iterations.
    pub max_linear_predictor: f64,
    /// Minimum ratio of smallest to largest singular value of the design.
    pub rank_tol: f64,
    /// Prepend an unpenalized, uncounted intercept column.
    pub intercept: bool,
    /// Fix the dispersion instead of profiling it (Gaussian only).
    pub dispersion: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iter: 100,
            score_tol_per_obs: 1e-8,
            max_linear_predictor: 30.0,
            rank_tol: 1e-10,
            intercept: false,
            dispersion: None,
        }
    }
}

impl FitOptions {
    pub fn with_intercept(mut self, intercept: bool) -> Self {
        self.intercept = intercept;
        self
    }

    pub fn score_tol(&self, n: usize) -> f64 {
        self.score_tol_per_obs * n as f64
    }
}

/// QMLE on a support.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub support: ModelSupport,
    pub intercept: Option<f64>,
    /// Coefficients of the support columns, in support order.
    pub beta_hat: Vec<f64>,
    /// Quasi-log-likelihood at the optimum, including `Σ c(yᵢ, τ)`.
    pub loglik: f64,
    pub dispersion_hat: f64,
    pub iterations: usize,
    pub converged: bool,
    pub score_sup_norm: f64,
    pub separation_flag: bool,
}

impl FitResult {
    /// Coefficients of the working design (intercept first when present).
    pub fn working_coefficients(&self) -> Vec<f64> {
        let mut c = Vec::with_capacity(self.beta_hat.len() + 1);
        c.extend(self.intercept);
        c.extend_from_slice(&self.beta_hat);
        c
    }

    /// A fit usable for model comparison: either the score equation was
    /// solved, or the iterates were stopped by the separation guard with a
    /// finite likelihood.
    pub fn is_admissible(&self) -> bool {
        (self.converged || self.separation_flag) && self.loglik.is_finite()
    }

    /// Linear predictor for a row given as `value(column_index)`.
    pub fn linear_predictor(&self, value: impl Fn(usize) -> f64) -> f64 {
        let mut eta = self.intercept.unwrap_or(0.0);
        for (&j, &b) in self.support.indices().iter().zip(&self.beta_hat) {
            eta += b * value(j);
        }
        eta
    }
}

fn check_dims(design: &Matrix, response: &[f64], beta: &[f64]) -> Result<()> {
    if design.nrows() != response.len() {
        return Err(Error::DimensionMismatch { expected: design.nrows(), found: response.len() });
    }
    if design.ncols() != beta.len() {
        return Err(Error::DimensionMismatch { expected: design.ncols(), found: beta.len() });
    }
    Ok(())
}

/// `ℓ(β)` from precomputed linear predictors.
fn loglik_from_theta(family: GlmFamily, theta: &[f64], response: &[f64], dispersion: f64) -> f64 {
    match family {
        GlmFamily::Gaussian => {
            let n = response.len() as f64;
            let rss: f64 = theta.iter().zip(response).map(|(t, y)| (y - t) * (y - t)).sum();
            -rss / (2.0 * dispersion) - 0.5 * n * crate::math::ln(2.0 * core::f64::consts::PI * dispersion)
        }
        GlmFamily::BernoulliLogit => theta.iter().zip(response).map(|(&t, &y)| y * t - family.cumulant(t)).sum(),
    }
}

/// Quasi-log-likelihood `ℓ(y, β)` including the normalizing term.
pub fn log_likelihood(
    family: GlmFamily,
    design: &Matrix,
    response: &[f64],
    beta: &[f64],
    dispersion: f64,
) -> Result<f64> {
    check_dims(design, response, beta)?;
    if !(dispersion > 0.0) || !dispersion.is_finite() {
        return Err(Error::InvalidDispersion);
    }
    if beta.iter().chain(response).any(|v| !v.is_finite()) || !design.is_finite() {
        return Err(Error::NonFinite);
    }
    let theta = design.mul_vec(beta);
    Ok(loglik_from_theta(family, &theta, response, dispersion))
}

/// Score `Xᵀ[y − μ(Xβ)]` (dispersion-free).
pub fn score(family: GlmFamily, design: &Matrix, response: &[f64], beta: &[f64]) -> Result<Vec<f64>> {
    check_dims(design, response, beta)?;
    let theta = design.mul_vec(beta);
    Ok(score_from_theta(family, design, response, &theta))
}

fn score_from_theta(family: GlmFamily, design: &Matrix, target: &[f64], theta: &[f64]) -> Vec<f64> {
    let resid: Vec<f64> = target.iter().zip(theta).map(|(&y, &t)| y - family.mean(t)).collect();
    design.tr_mul_vec(&resid)
}

/// Verifies full column rank and returns the QR factorization.
pub fn check_rank(design: &Matrix, rank_tol: f64) -> Result<Qr> {
    let (n, d) = (design.nrows(), design.ncols());
    if d == 0 {
        return Err(Error::Empty("support"));
    }
    if d > n {
        return Err(Error::SupportTooLarge { size: d, rows: n });
    }
    let qr = Qr::new(design);
    let sv = qr.singular_values();
    let (largest, smallest) = (sv[0], sv[d - 1]);
    let ratio = if largest > 0.0 { smallest / largest } else { 0.0 };
    if !(ratio > rank_tol) {
        return Err(Error::RankDeficient { ratio });
    }
    Ok(qr)
}

/// Outcome of the Newton solver for `Xᵀ[target − μ(Xβ)] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSolution {
    pub beta: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub score_sup_norm: f64,
    pub separation: bool,
}

/// Damped Newton on the concave objective `targetᵀXβ − 1ᵀb(Xβ)` with
/// step-halving and a clamp on `‖Xβ‖∞`.
///
/// `target` may be an observed response or a mean vector `EY`.
pub fn solve_score_equation(
    family: GlmFamily,
    design: &Matrix,
    target: &[f64],
    start: Option<&[f64]>,
    opts: &FitOptions,
) -> Result<ScoreSolution> {
    let (n, d) = (design.nrows(), design.ncols());
    if target.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: target.len() });
    }
    let tol = opts.score_tol(n);
    let clamp = opts.max_linear_predictor;
    let objective =
        |theta: &[f64]| -> f64 { theta.iter().zip(target).map(|(&t, &y)| y * t - family.cumulant(t)).sum() };

    let mut beta = match start {
        Some(s) if s.len() == d => s.to_vec(),
        Some(s) => return Err(Error::DimensionMismatch { expected: d, found: s.len() }),
        None => vec![0.0; d],
    };
    let mut theta = design.mul_vec(&beta);
    if sup_norm(&theta) > clamp {
        beta.iter_mut().for_each(|b| *b = 0.0);
        theta.iter_mut().for_each(|t| *t = 0.0);
    }
    let mut value = objective(&theta);
    let mut grad = score_from_theta(family, design, target, &theta);
    let mut iterations = 0;
    let mut separation = false;

    while sup_norm(&grad) > tol && iterations < opts.max_iter {
        iterations += 1;
        let weights: Vec<f64> = theta.iter().map(|&t| family.variance(t)).collect();
        let Some(chol) = Cholesky::new(&design.weighted_gram(&weights)) else {
            separation = sup_norm(&theta) >= 0.5 * clamp;
            break;
        };
        let delta = chol.solve(&grad);
        let dtheta = design.mul_vec(&delta);

        // Largest step keeping every |θᵢ| within the clamp.
        let mut step: f64 = 1.0;
        let mut capped = false;
        for (&t, &dt) in theta.iter().zip(&dtheta) {
            let limit = if dt > 0.0 {
                (clamp - t) / dt
            } else if dt < 0.0 {
                (-clamp - t) / dt
            } else {
                continue;
            };
            if limit < step {
                step = limit.max(0.0);
                capped = true;
            }
        }

        let mut accepted = None;
        let mut trial = vec![0.0; n];
        for _ in 0..60 {
            if step <= 0.0 {
                break;
            }
            for ((tr, &t), &dt) in trial.iter_mut().zip(&theta).zip(&dtheta) {
                *tr = t + step * dt;
            }
            let v = objective(&trial);
            if v >= value {
                accepted = Some(v);
                break;
            }
            // Near the optimum the gain drops below the rounding error of the
            // objective; fall back to the score norm to judge progress.
            if v >= value - 8.0 * f64::EPSILON * (1.0 + abs(value))
                && sup_norm(&score_from_theta(family, design, target, &trial)) < sup_norm(&grad)
            {
                accepted = Some(v);
                break;
            }
            step *= 0.5;
        }
        let Some(new_value) = accepted else {
            separation = capped;
            break;
        };
        let gain = new_value - value;
        for (b, &db) in beta.iter_mut().zip(&delta) {
            *b += step * db;
        }
        core::mem::swap(&mut theta, &mut trial);
        value = new_value;
        grad = score_from_theta(family, design, target, &theta);
        if capped && gain <= 1e-10 * (1.0 + abs(value)) {
            separation = true;
            break;
        }
    }

    let score_sup_norm = sup_norm(&grad);
    let converged = score_sup_norm <= tol;
    Ok(ScoreSolution { beta, iterations, converged, score_sup_norm, separation: separation && !converged })
}

/// Quasi-maximum-likelihood fit on `design_sub` (no intercept column; set
/// [`FitOptions::intercept`] to add one). The returned support is
/// `{0, …, d − 1}`; see [`fit_support`] for fits on a subset of a full design.
pub fn fit_qmle(family: GlmFamily, design_sub: &Matrix, response: &[f64], opts: &FitOptions) -> Result<FitResult> {
    let support = ModelSupport::leading(design_sub.ncols());
    fit_working(family, design_sub, response, support, opts)
}

/// Fits the columns of `dataset` listed in `support`.
pub fn fit_support(
    family: GlmFamily,
    dataset: &Dataset,
    support: &ModelSupport,
    opts: &FitOptions,
) -> Result<FitResult> {
    let sub = dataset.design().select_columns(support.indices());
    fit_working(family, &sub, dataset.response(), support.clone(), opts)
}

/// Builds the working design for a fit: the support columns, with a leading
/// ones column when the intercept is enabled.
pub fn working_design(design_sub: &Matrix, intercept: bool) -> Matrix {
    if intercept {
        design_sub.with_leading_ones()
    } else {
        design_sub.clone()
    }
}

fn fit_working(
    family: GlmFamily,
    design_sub: &Matrix,
    response: &[f64],
    support: ModelSupport,
    opts: &FitOptions,
) -> Result<FitResult> {
    let n = response.len();
    if design_sub.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: design_sub.nrows() });
    }
    if design_sub.ncols() == 0 && !opts.intercept {
        return Err(Error::Empty("support"));
    }
    if !design_sub.is_finite() || response.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    if let Some(index) = response.iter().position(|&y| !family.accepts_response(y)) {
        return Err(Error::InvalidResponse { index, family: family.name() });
    }
    if let Some(tau) = opts.dispersion {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidDispersion);
        }
    }
    let x = working_design(design_sub, opts.intercept);
    let qr = check_rank(&x, opts.rank_tol)?;

    let (coef, iterations, separation) = match family {
        GlmFamily::Gaussian => (qr.solve_least_squares(response), 1, false),
        GlmFamily::BernoulliLogit => {
            let start = opts.intercept.then(|| {
                let ybar = response.iter().sum::<f64>() / n as f64;
                let mut s = vec![0.0; x.ncols()];
                s[0] = family.link(ybar.clamp(1e-6, 1.0 - 1e-6));
                s
            });
            let sol = solve_score_equation(family, &x, response, start.as_deref(), opts)?;
            (sol.beta, sol.iterations, sol.separation)
        }
    };

    let theta = x.mul_vec(&coef);
    let dispersion_hat = match (family, opts.dispersion) {
        (GlmFamily::BernoulliLogit, _) => 1.0,
        (GlmFamily::Gaussian, Some(tau)) => tau,
        (GlmFamily::Gaussian, None) => {
            let rss: f64 = theta.iter().zip(response).map(|(t, y)| (y - t) * (y - t)).sum();
            let mean_sq = response.iter().map(|y| y * y).sum::<f64>() / n as f64;
            (rss / n as f64).max(f64::EPSILON * mean_sq.max(f64::MIN_POSITIVE))
        }
    };
    let loglik = loglik_from_theta(family, &theta, response, dispersion_hat);
    let score_sup_norm = sup_norm(&score_from_theta(family, &x, response, &theta));
    let converged = score_sup_norm <= opts.score_tol(n) && loglik.is_finite();

    let (intercept, beta_hat) = if opts.intercept { (Some(coef[0]), coef[1..].to_vec()) } else { (None, coef) };
    Ok(FitResult {
        support,
        intercept,
        beta_hat,
        loglik,
        dispersion_hat,
        iterations,
        converged,
        score_sup_norm,
        separation_flag: separation && !converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_loglik_standard_normal_at_zero() {
        let x = Matrix::from_row_major(1, 1, &[1.0]);
        let ll = log_likelihood(GlmFamily::Gaussian, &x, &[0.0], &[0.0], 1.0).unwrap();
        assert_relative_eq!(ll, -0.918_938_533_204_672_7, epsilon = 1e-12);
    }

    #[test]
    fn bernoulli_loglik_coin() {
        let x = Matrix::from_row_major(1, 1, &[1.0]);
        let ll = log_likelihood(GlmFamily::BernoulliLogit, &x, &[1.0], &[0.0], 1.0).unwrap();
        assert_relative_eq!(ll, -core::f64::consts::LN_2, epsilon = 1e-15);
        let x2 = Matrix::from_row_major(2, 1, &[1.0, 1.0]);
        let ll2 = log_likelihood(GlmFamily::BernoulliLogit, &x2, &[1.0, 0.0], &[0.0], 1.0).unwrap();
        assert_relative_eq!(ll2, -1.386_294_361_119_890_6, epsilon = 1e-12);
        // θ − 2 log(1 + e^θ) at θ = 0.7
        let ll3 = log_likelihood(GlmFamily::BernoulliLogit, &x2, &[1.0, 0.0], &[0.7], 1.0).unwrap();
        assert_relative_eq!(ll3, 0.7 - 2.0 * libm::log(1.0 + libm::exp(0.7)), epsilon = 1e-12);
    }

    #[test]
    fn loglik_errors() {
        let x = Matrix::from_row_major(2, 1, &[1.0, 1.0]);
        assert!(matches!(
            log_likelihood(GlmFamily::Gaussian, &x, &[1.0], &[0.0], 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(log_likelihood(GlmFamily::Gaussian, &x, &[1.0, 2.0], &[0.0], 0.0), Err(Error::InvalidDispersion));
        assert_eq!(log_likelihood(GlmFamily::Gaussian, &x, &[1.0, f64::NAN], &[0.0], 1.0), Err(Error::NonFinite));
        assert!(score(GlmFamily::Gaussian, &x, &[1.0, 2.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn bernoulli_score_root() {
        let x = Matrix::from_row_major(2, 1, &[1.0, 1.0]);
        for b in [-1.5, 0.0, 0.4] {
            let s = score(GlmFamily::BernoulliLogit, &x, &[1.0, 0.0], &[b]).unwrap();
            assert_relative_eq!(s[0], 1.0 - 2.0 * crate::math::sigmoid(b), epsilon = 1e-15);
        }
        let fit = fit_qmle(GlmFamily::BernoulliLogit, &x, &[1.0, 0.0], &FitOptions::default()).unwrap();
        assert!(fit.converged);
        assert_relative_eq!(fit.beta_hat[0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn bernoulli_score_at_zero_is_centered_response() {
        let x = Matrix::from_row_major(3, 2, &[1.0, 2.0, -1.0, 0.5, 0.3, 0.0]);
        let y = [1.0, 0.0, 1.0];
        let s = score(GlmFamily::BernoulliLogit, &x, &y, &[0.0, 0.0]).unwrap();
        let expected = x.tr_mul_vec(&[0.5, -0.5, 0.5]);
        assert_eq!(s, expected);
    }

    #[test]
    fn gaussian_exact_fit() {
        let x = Matrix::from_row_major(2, 1, &[1.0, 2.0]);
        let fit = fit_qmle(GlmFamily::Gaussian, &x, &[1.0, 2.0], &FitOptions::default()).unwrap();
        assert_relative_eq!(fit.beta_hat[0], 1.0, epsilon = 1e-14);
        assert!(fit.score_sup_norm < 1e-12);
        assert!(fit.converged);
        assert!(fit.loglik.is_finite());
    }

    #[test]
    fn gaussian_dispersion_is_rss_over_n() {
        let x = Matrix::from_row_major(3, 1, &[1.0, 1.0, 1.0]);
        let fit = fit_qmle(GlmFamily::Gaussian, &x, &[0.0, 1.0, 2.0], &FitOptions::default()).unwrap();
        assert_relative_eq!(fit.beta_hat[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(fit.dispersion_hat, 2.0 / 3.0, epsilon = 1e-14);
        let tau: f64 = 2.0 / 3.0;
        let expected = -1.5 - 1.5 * libm::log(2.0 * core::f64::consts::PI * tau);
        assert_relative_eq!(fit.loglik, expected, epsilon = 1e-12);
    }

    #[test]
    fn rank_deficient_design_is_rejected() {
        let x = Matrix::from_row_major(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let err = fit_qmle(GlmFamily::Gaussian, &x, &[1.0, 0.0, 2.0], &FitOptions::default()).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { .. }));
        let wide = Matrix::from_row_major(1, 2, &[1.0, 2.0]);
        assert!(matches!(
            fit_qmle(GlmFamily::Gaussian, &wide, &[1.0], &FitOptions::default()),
            Err(Error::SupportTooLarge { .. })
        ));
    }

    #[test]
    fn separated_logistic_is_flagged_and_finite() {
        let x = Matrix::from_row_major(4, 1, &[-2.0, -1.0, 1.0, 2.0]);
        let y = [0.0, 0.0, 1.0, 1.0];
        let fit = fit_qmle(GlmFamily::BernoulliLogit, &x, &y, &FitOptions::default()).unwrap();
        assert!(fit.separation_flag);
        assert!(!fit.converged);
        assert!(fit.loglik.is_finite());
        assert!(fit.is_admissible());
        let theta_max = 2.0 * fit.beta_hat[0].abs();
        assert!(theta_max <= 30.0 + 1e-9);
    }

    #[test]
    fn intercept_only_logistic_recovers_logit_of_mean() {
        let x = Matrix::zeros(4, 0);
        let y = [1.0, 0.0, 1.0, 1.0];
        let opts = FitOptions::default().with_intercept(true);
        let fit = fit_qmle(GlmFamily::BernoulliLogit, &x, &y, &opts).unwrap();
        assert!(fit.converged);
        assert_relative_eq!(fit.intercept.unwrap(), libm::log(3.0), epsilon = 1e-9);
    }
}
