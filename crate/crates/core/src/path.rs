//! L1-penalized regularization path used to generate candidate supports.
//!
//! The penalized objective at `λ` is `−ℓ(β)/n + λ‖β‖₁` on the (optionally)
//! scaled design; the intercept, when present, is never penalized. Gaussian
//! paths use exact soft-threshold coordinate updates. Logistic paths use a
//! proximal-Newton outer loop (weighted least-squares coordinate descent on
//! the local quadratic, then a backtracking step on the true objective).
//! Solutions are warm-started along a log-spaced grid from `λ_max` down.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::data::{Dataset, ModelSupport};
use crate::family::GlmFamily;
use crate::glm::{fit_support, FitOptions, FitResult};
use crate::linalg::{dot, Matrix};
use crate::math::{abs, exp, ln, sqrt};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LassoPathConfig {
    pub n_lambda: usize,
    pub lambda_min_ratio: f64,
    /// Largest support kept; `None` means `min(n / 2, 50)`.
    pub max_support: Option<usize>,
    pub tol_cd: f64,
    /// Budget of coordinate passes per `λ` (outer iterations for logistic).
    pub max_passes: usize,
    pub standardize: bool,
    /// `None` uses [`GlmFamily::default_intercept`].
    pub intercept: Option<bool>,
}

impl Default for LassoPathConfig {
    fn default() -> Self {
        Self {
            n_lambda: 100,
            lambda_min_ratio: 1e-3,
            max_support: None,
            tol_cd: 1e-7,
            max_passes: 1000,
            standardize: true,
            intercept: None,
        }
    }
}

impl LassoPathConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.n_lambda < 2 {
            return Err(Error::InvalidConfig("n_lambda must be at least 2"));
        }
        if !(self.lambda_min_ratio > 0.0 && self.lambda_min_ratio < 1.0) {
            return Err(Error::InvalidConfig("lambda_min_ratio must lie in (0, 1)"));
        }
        if self.max_support.is_some_and(|k| k > n || k == 0) {
            return Err(Error::InvalidConfig("max_support must lie in [1, n]"));
        }
        if !(self.tol_cd > 0.0) || self.max_passes == 0 {
            return Err(Error::InvalidConfig("tol_cd and max_passes must be positive"));
        }
        Ok(())
    }

    pub fn resolved_max_support(&self, n: usize) -> usize {
        self.max_support.unwrap_or((n / 2).clamp(1, 50))
    }

    pub fn resolved_intercept(&self, family: GlmFamily) -> bool {
        self.intercept.unwrap_or(family.default_intercept())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathWarning {
    /// The response is constant, so no covariate can enter.
    DegenerateResponse,
}

/// Solution at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    pub lambda: f64,
    pub intercept: f64,
    /// Coefficients on the original column scale, length `p`.
    pub coefficients: Vec<f64>,
    pub converged: bool,
    pub passes: usize,
    /// Penalized objective after each coordinate pass (Gaussian) or each
    /// accepted outer step (logistic).
    pub objective_trace: Vec<f64>,
}

impl PathPoint {
    pub fn support(&self) -> Vec<usize> {
        self.coefficients.iter().enumerate().filter(|(_, &b)| b != 0.0).map(|(j, _)| j).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoPath {
    pub family: GlmFamily,
    pub intercept: bool,
    pub lambda_max: f64,
    pub lambda_grid: Vec<f64>,
    /// Points actually solved, in grid order (the path stops early once the
    /// support exceeds the limit).
    pub points: Vec<PathPoint>,
    /// Column scale factors: the penalty applies to `scale_j · β_j`.
    pub column_scale: Vec<f64>,
    /// Grid indices whose solver did not converge; their supports are skipped.
    pub skipped: Vec<usize>,
    pub warning: Option<PathWarning>,
    pub max_support: usize,
}

impl LassoPath {
    /// Distinct nonempty supports in order of first appearance along the
    /// decreasing grid, each no larger than `max_support`.
    pub fn candidate_sequence(&self) -> CandidateSequence {
        let mut seen = BTreeSet::new();
        let mut supports = Vec::new();
        for (k, point) in self.points.iter().enumerate() {
            if self.skipped.contains(&k) {
                continue;
            }
            let s = point.support();
            if s.is_empty() || s.len() > self.max_support {
                continue;
            }
            if seen.insert(s.clone()) {
                supports.push(ModelSupport::new(s, self.column_scale.len()).expect("path supports are sorted"));
            }
        }
        CandidateSequence {
            supports,
            lambda_grid: self.lambda_grid.clone(),
            skipped: self.skipped.clone(),
            warning: self.warning,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CandidateSequence {
    pub supports: Vec<ModelSupport>,
    pub lambda_grid: Vec<f64>,
    pub skipped: Vec<usize>,
    pub warning: Option<PathWarning>,
}

impl CandidateSequence {
    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }
}

#[inline]
fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

/// Candidate supports from the L1 path.
pub fn lasso_path(family: GlmFamily, dataset: &Dataset, config: &LassoPathConfig) -> Result<CandidateSequence> {
    Ok(compute_path(family, dataset, config)?.candidate_sequence())
}

/// Full path with per-point solutions and diagnostics.
pub fn compute_path(family: GlmFamily, dataset: &Dataset, config: &LassoPathConfig) -> Result<LassoPath> {
    let (n, p) = (dataset.n(), dataset.p());
    config.validate(n)?;
    dataset.validate_for(family)?;
    let y = dataset.response();
    let intercept = config.resolved_intercept(family);
    let max_support = config.resolved_max_support(n);

    let column_scale: Vec<f64> = (0..p)
        .map(|j| {
            if config.standardize {
                let c = dataset.design().col(j);
                sqrt(dot(c, c) / n as f64)
            } else {
                1.0
            }
        })
        .collect();
    let mut x = dataset.design().clone();
    for (j, &s) in column_scale.iter().enumerate() {
        let col = x.col_mut(j);
        if s > 0.0 {
            col.iter_mut().for_each(|v| *v /= s);
        } else {
            col.iter_mut().for_each(|v| *v = 0.0);
        }
    }

    let degenerate = y.iter().all(|&v| v == y[0]);
    let mut path = LassoPath {
        family,
        intercept,
        lambda_max: 0.0,
        lambda_grid: Vec::new(),
        points: Vec::new(),
        column_scale,
        skipped: Vec::new(),
        warning: None,
        max_support,
    };
    if degenerate {
        path.warning = Some(PathWarning::DegenerateResponse);
        return Ok(path);
    }

    // Null model: intercept only (or nothing).
    let null_intercept = if intercept {
        let ybar = y.iter().sum::<f64>() / n as f64;
        family.link(ybar)
    } else {
        0.0
    };
    let null_resid: Vec<f64> = y.iter().map(|&v| v - family.mean(null_intercept)).collect();
    let lambda_max = (0..p).map(|j| abs(dot(x.col(j), &null_resid)) / n as f64).fold(0.0, f64::max);
    path.lambda_max = lambda_max;
    if !(lambda_max > 0.0) {
        path.warning = Some(PathWarning::DegenerateResponse);
        return Ok(path);
    }
    let k = config.n_lambda;
    let log_ratio = ln(config.lambda_min_ratio);
    path.lambda_grid = (0..k)
        .map(|i| if i == 0 { lambda_max } else { lambda_max * exp(log_ratio * i as f64 / (k - 1) as f64) })
        .collect();

    let mut solver = Solver::new(family, &x, y, intercept, null_intercept, config);
    for (idx, &lambda) in path.lambda_grid.iter().enumerate() {
        let (converged, passes, objective_trace) = solver.solve(lambda);
        if !converged {
            path.skipped.push(idx);
        }
        let coefficients: Vec<f64> =
            solver.beta.iter().zip(&path.column_scale).map(|(&b, &s)| if b == 0.0 { 0.0 } else { b / s }).collect();
        let size = solver.beta.iter().filter(|&&b| b != 0.0).count();
        path.points.push(PathPoint {
            lambda,
            intercept: solver.intercept,
            coefficients,
            converged,
            passes,
            objective_trace,
        });
        if size > max_support {
            break;
        }
    }
    Ok(path)
}

/// Coordinate-descent state carried along the grid.
struct Solver<'a> {
    family: GlmFamily,
    x: &'a Matrix,
    y: &'a [f64],
    use_intercept: bool,
    tol: f64,
    max_passes: usize,
    beta: Vec<f64>,
    intercept: f64,
    /// Linear predictor `intercept + Xβ`.
    eta: Vec<f64>,
    /// Unweighted column mean squares.
    col_ms: Vec<f64>,
}

impl<'a> Solver<'a> {
    fn new(
        family: GlmFamily,
        x: &'a Matrix,
        y: &'a [f64],
        use_intercept: bool,
        intercept: f64,
        config: &LassoPathConfig,
    ) -> Self {
        let n = y.len() as f64;
        let col_ms = (0..x.ncols()).map(|j| dot(x.col(j), x.col(j)) / n).collect();
        Self {
            family,
            x,
            y,
            use_intercept,
            tol: config.tol_cd,
            max_passes: config.max_passes,
            beta: vec![0.0; x.ncols()],
            intercept,
            eta: vec![intercept; y.len()],
            col_ms,
        }
    }

    fn l1(&self) -> f64 {
        self.beta.iter().map(|b| abs(*b)).sum()
    }

    fn solve(&mut self, lambda: f64) -> (bool, usize, Vec<f64>) {
        match self.family {
            GlmFamily::Gaussian => self.solve_gaussian(lambda),
            GlmFamily::BernoulliLogit => self.solve_logistic(lambda),
        }
    }

    fn gaussian_objective(&self, resid: &[f64], lambda: f64) -> f64 {
        dot(resid, resid) / (2.0 * resid.len() as f64) + lambda * self.l1()
    }

    fn solve_gaussian(&mut self, lambda: f64) -> (bool, usize, Vec<f64>) {
        let n = self.y.len() as f64;
        let mut resid: Vec<f64> = self.y.iter().zip(&self.eta).map(|(y, e)| y - e).collect();
        let mut trace = Vec::new();
        let mut passes = 0;
        let p = self.beta.len();
        let mut converged = false;
        let all: Vec<usize> = (0..p).collect();

        'outer: while passes < self.max_passes {
            // Full sweep, then iterate on the active set until it settles.
            let delta = self.gaussian_pass(&all, lambda, &mut resid, n);
            passes += 1;
            trace.push(self.gaussian_objective(&resid, lambda));
            if delta < self.tol {
                converged = true;
                break;
            }
            loop {
                if passes >= self.max_passes {
                    break 'outer;
                }
                let active: Vec<usize> = (0..p).filter(|&j| self.beta[j] != 0.0).collect();
                let delta = self.gaussian_pass(&active, lambda, &mut resid, n);
                passes += 1;
                trace.push(self.gaussian_objective(&resid, lambda));
                if delta < self.tol {
                    break;
                }
            }
        }
        for (e, (y, r)) in self.eta.iter_mut().zip(self.y.iter().zip(&resid)) {
            *e = y - r;
        }
        (converged, passes, trace)
    }

    /// One cyclic pass over `coords`; returns the largest scaled change.
    fn gaussian_pass(&mut self, coords: &[usize], lambda: f64, resid: &mut [f64], n: f64) -> f64 {
        let mut max_delta: f64 = 0.0;
        if self.use_intercept {
            let shift = resid.iter().sum::<f64>() / n;
            if shift != 0.0 {
                self.intercept += shift;
                resid.iter_mut().for_each(|r| *r -= shift);
                max_delta = max_delta.max(abs(shift));
            }
        }
        for &j in coords {
            let v = self.col_ms[j];
            if v == 0.0 {
                continue;
            }
            let col = self.x.col(j);
            let old = self.beta[j];
            let grad = dot(col, resid) / n;
            let new = soft_threshold(grad + v * old, lambda) / v;
            if new != old {
                let diff = new - old;
                self.beta[j] = new;
                for (r, &xv) in resid.iter_mut().zip(col) {
                    *r -= diff * xv;
                }
                max_delta = max_delta.max(abs(diff) * sqrt(v));
            }
        }
        max_delta
    }

    fn logistic_objective(&self, eta: &[f64], beta_l1: f64, lambda: f64) -> f64 {
        let n = self.y.len() as f64;
        let nll: f64 = eta.iter().zip(self.y).map(|(&t, &y)| self.family.cumulant(t) - y * t).sum();
        nll / n + lambda * beta_l1
    }

    fn solve_logistic(&mut self, lambda: f64) -> (bool, usize, Vec<f64>) {
        const MIN_WEIGHT: f64 = 1e-5;
        let n = self.y.len();
        let nf = n as f64;
        let p = self.beta.len();
        let mut trace = Vec::new();
        let mut value = self.logistic_objective(&self.eta, self.l1(), lambda);
        let mut passes = 0;
        let mut converged = false;
        let mut weights = vec![0.0; n];
        let mut resid = vec![0.0; n];
        let mut wcol_ms = vec![0.0; p];
        let all: Vec<usize> = (0..p).collect();

        while passes < self.max_passes {
            passes += 1;
            for i in 0..n {
                let mu = self.family.mean(self.eta[i]);
                let w = (mu * (1.0 - mu)).max(MIN_WEIGHT);
                weights[i] = w;
                resid[i] = (self.y[i] - mu) / w;
            }
            let wsum: f64 = weights.iter().sum();
            for j in 0..p {
                let c = self.x.col(j);
                wcol_ms[j] = c.iter().zip(&weights).map(|(x, w)| w * x * x).sum::<f64>() / nf;
            }

            // Inner weighted least squares, starting from the current point.
            let old_beta = self.beta.clone();
            let old_intercept = self.intercept;
            let mut beta = self.beta.clone();
            let mut b0 = self.intercept;
            let mut inner_passes = 0;
            let inner = |coords: &[usize], beta: &mut [f64], b0: &mut f64, resid: &mut [f64]| -> f64 {
                let mut max_delta: f64 = 0.0;
                if self.use_intercept {
                    let shift = resid.iter().zip(&weights).map(|(r, w)| r * w).sum::<f64>() / wsum;
                    if shift != 0.0 {
                        *b0 += shift;
                        resid.iter_mut().for_each(|r| *r -= shift);
                        max_delta = max_delta.max(abs(shift) * sqrt(wsum / nf));
                    }
                }
                for &j in coords {
                    let v = wcol_ms[j];
                    if v == 0.0 {
                        continue;
                    }
                    let col = self.x.col(j);
                    let old = beta[j];
                    let grad =
                        col.iter().zip(resid.iter()).zip(&weights).map(|((x, r), w)| w * x * r).sum::<f64>() / nf;
                    let new = soft_threshold(grad + v * old, lambda) / v;
                    if new != old {
                        let diff = new - old;
                        beta[j] = new;
                        for (r, &xv) in resid.iter_mut().zip(col) {
                            *r -= diff * xv;
                        }
                        max_delta = max_delta.max(abs(diff) * sqrt(v));
                    }
                }
                max_delta
            };
            'wls: loop {
                inner_passes += 1;
                if inner(&all, &mut beta, &mut b0, &mut resid) < self.tol || inner_passes >= self.max_passes {
                    break;
                }
                loop {
                    inner_passes += 1;
                    let active: Vec<usize> = (0..p).filter(|&j| beta[j] != 0.0).collect();
                    if inner(&active, &mut beta, &mut b0, &mut resid) < self.tol {
                        break;
                    }
                    if inner_passes >= self.max_passes {
                        break 'wls;
                    }
                }
            }

            // Backtracking on the true objective along old → new.
            let step_beta: Vec<f64> = beta.iter().zip(&old_beta).map(|(a, b)| a - b).collect();
            let step_b0 = b0 - old_intercept;
            let old_eta = self.eta.clone();
            let mut dir_eta = vec![step_b0; n];
            for (j, &d) in step_beta.iter().enumerate() {
                if d != 0.0 {
                    for (e, &xv) in dir_eta.iter_mut().zip(self.x.col(j)) {
                        *e += d * xv;
                    }
                }
            }
            let mut t = 1.0;
            let mut accepted = false;
            let mut trial_eta = vec![0.0; n];
            for _ in 0..40 {
                for i in 0..n {
                    trial_eta[i] = old_eta[i] + t * dir_eta[i];
                }
                let l1: f64 = old_beta.iter().zip(&step_beta).map(|(b, d)| abs(b + t * d)).sum();
                let trial_value = self.logistic_objective(&trial_eta, l1, lambda);
                if trial_value <= value {
                    for j in 0..p {
                        self.beta[j] = if t == 1.0 { beta[j] } else { old_beta[j] + t * step_beta[j] };
                    }
                    self.intercept = old_intercept + t * step_b0;
                    self.eta.copy_from_slice(&trial_eta);
                    value = trial_value;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            trace.push(value);
            let change = step_beta
                .iter()
                .zip(&wcol_ms)
                .map(|(d, v)| abs(*d) * sqrt(*v))
                .fold(abs(step_b0) * sqrt(wsum / nf), f64::max)
                * t;
            if !accepted || change < self.tol {
                converged = accepted || change < self.tol;
                break;
            }
        }
        (converged, passes, trace)
    }
}

/// A candidate support with its refit (or the reason it could not be fit).
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub support: ModelSupport,
    pub fit: Result<FitResult>,
}

/// Unpenalized QMLE refit of every support in the sequence, in order.
pub fn refit_candidates(
    family: GlmFamily,
    dataset: &Dataset,
    seq: &CandidateSequence,
    opts: &FitOptions,
) -> Vec<Candidate> {
    seq.supports.iter().map(|s| Candidate { support: s.clone(), fit: fit_support(family, dataset, s, opts) }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn orthonormal_dataset() -> Dataset {
        // Columns of a scaled 4×4 Hadamard matrix: ZᵀZ / n = I.
        let h = [
            1.0, 1.0, 1.0, 1.0, //
            1.0, -1.0, 1.0, -1.0, //
            1.0, 1.0, -1.0, -1.0, //
            1.0, -1.0, -1.0, 1.0,
        ];
        let z = Matrix::from_row_major(4, 4, &h);
        Dataset::new(vec![3.0, 1.0, -0.5, 0.2], z).unwrap()
    }

    #[test]
    fn orthonormal_design_is_soft_threshold() {
        let ds = orthonormal_dataset();
        let cfg = LassoPathConfig { n_lambda: 20, lambda_min_ratio: 0.01, max_support: Some(4), ..Default::default() };
        let path = compute_path(GlmFamily::Gaussian, &ds, &cfg).unwrap();
        let zty = ds.design().tr_mul_vec(ds.response());
        for point in &path.points {
            for j in 0..4 {
                let expected = soft_threshold(zty[j] / 4.0, point.lambda);
                assert_relative_eq!(point.coefficients[j], expected, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn lambda_max_gives_empty_support() {
        let ds = orthonormal_dataset();
        let path = compute_path(GlmFamily::Gaussian, &ds, &LassoPathConfig::default()).unwrap();
        assert!(path.points[0].support().is_empty());
        assert!(path.candidate_sequence().supports.iter().all(|s| !s.is_empty()));
    }

    #[test]
    fn constant_response_warns() {
        let z = Matrix::from_row_major(3, 1, &[1.0, 2.0, 3.0]);
        let ds = Dataset::new(vec![1.0, 1.0, 1.0], z).unwrap();
        let seq = lasso_path(GlmFamily::BernoulliLogit, &ds, &LassoPathConfig::default()).unwrap();
        assert!(seq.is_empty());
        assert_eq!(seq.warning, Some(PathWarning::DegenerateResponse));
    }

    #[test]
    fn config_validation() {
        let bad = LassoPathConfig { n_lambda: 1, ..Default::default() };
        assert!(bad.validate(10).is_err());
        let bad = LassoPathConfig { lambda_min_ratio: 1.0, ..Default::default() };
        assert!(bad.validate(10).is_err());
        let bad = LassoPathConfig { max_support: Some(11), ..Default::default() };
        assert!(bad.validate(10).is_err());
        assert_eq!(LassoPathConfig::default().resolved_max_support(200), 50);
        assert_eq!(LassoPathConfig::default().resolved_max_support(40), 20);
    }
}
