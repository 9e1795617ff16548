#![allow(clippy::needless_range_loop)]

mod common;

use approx::assert_relative_eq;
use common::{normal_matrix, normal_vec, simulate_glm, to_nalgebra};
use hgbic_core::glm::{log_likelihood, score};
use hgbic_core::{fit_qmle, Error, FitOptions, GlmFamily, Matrix};
use proptest::prelude::*;

#[test]
fn gaussian_qmle_matches_independent_least_squares() {
    for (seed, (n, d)) in [(20, 3), (50, 7), (200, 12)].into_iter().enumerate() {
        let x = normal_matrix(n, d, seed as u64);
        let y = normal_vec(n, 100 + seed as u64);
        let fit = fit_qmle(GlmFamily::Gaussian, &x, &y, &FitOptions::default()).unwrap();

        let xn = to_nalgebra(&x);
        let yn = nalgebra::DVector::from_column_slice(&y);
        let ols = (xn.transpose() * &xn).cholesky().unwrap().solve(&(xn.transpose() * &yn));
        for j in 0..d {
            assert!((fit.beta_hat[j] - ols[j]).abs() < 1e-8, "coef {j}: {} vs {}", fit.beta_hat[j], ols[j]);
        }
        let rss = (&yn - &xn * &ols).norm_squared();
        assert_relative_eq!(fit.dispersion_hat, rss / n as f64, max_relative = 1e-10);
    }
}

#[test]
fn one_dimensional_logistic_matches_grid_search() {
    let n = 20;
    let x = normal_matrix(n, 1, 7);
    let y = simulate_glm(GlmFamily::BernoulliLogit, &x, &[0.8], 8);
    assert!(y.contains(&1.0) && y.contains(&0.0));
    let fit = fit_qmle(GlmFamily::BernoulliLogit, &x, &y, &FitOptions::default()).unwrap();
    assert!(fit.converged);

    let loglik = |b: f64| -> f64 {
        (0..n)
            .map(|i| {
                let t = b * x.get(i, 0);
                y[i] * t - (1.0 + t.exp()).ln()
            })
            .sum()
    };
    let mut best = (f64::NEG_INFINITY, 0.0);
    for k in 0..=20_000 {
        let b = -10.0 + k as f64 * 1e-3;
        let v = loglik(b);
        if v > best.0 {
            best = (v, b);
        }
    }
    assert!((fit.beta_hat[0] - best.1).abs() <= 2e-3, "{} vs {}", fit.beta_hat[0], best.1);
}

#[test]
fn converged_fits_meet_the_score_tolerance() {
    for seed in 0..10 {
        let (n, d) = (80, 4);
        let x = normal_matrix(n, d, seed);
        let y = simulate_glm(GlmFamily::BernoulliLogit, &x, &[0.5, -0.5, 0.25, 0.0], seed + 50);
        let opts = FitOptions::default();
        let fit = fit_qmle(GlmFamily::BernoulliLogit, &x, &y, &opts).unwrap();
        if fit.converged {
            assert!(fit.score_sup_norm <= 1e-8 * n as f64);
            let s = score(GlmFamily::BernoulliLogit, &x, &y, &fit.beta_hat).unwrap();
            assert!(s.iter().all(|v| v.abs() <= 1e-8 * n as f64));
        } else {
            assert!(fit.separation_flag);
        }
    }
}

#[test]
fn qmle_is_a_local_maximum() {
    let (n, d) = (60, 3);
    let x = normal_matrix(n, d, 21);
    let y = simulate_glm(GlmFamily::BernoulliLogit, &x, &[1.0, -0.5, 0.3], 22);
    let fit = fit_qmle(GlmFamily::BernoulliLogit, &x, &y, &FitOptions::default()).unwrap();
    let at = |b: &[f64]| log_likelihood(GlmFamily::BernoulliLogit, &x, &y, b, 1.0).unwrap();
    let best = at(&fit.beta_hat);
    assert_relative_eq!(best, fit.loglik, max_relative = 1e-12);
    for k in 0..50 {
        let delta = normal_vec(d, 300 + k);
        let scale = 10f64.powi(-((k % 5) as i32) - 1);
        let moved: Vec<f64> = fit.beta_hat.iter().zip(&delta).map(|(b, e)| b + scale * e).collect();
        assert!(at(&moved) <= best + 1e-12);
    }
}

#[test]
fn fitted_values_are_invariant_to_reparameterization() {
    let (n, d) = (70, 3);
    let x = normal_matrix(n, d, 31);
    let y = simulate_glm(GlmFamily::BernoulliLogit, &x, &[0.7, 0.2, -0.9], 32);
    let t = Matrix::from_row_major(3, 3, &[2.0, 0.5, 0.0, -1.0, 1.0, 0.3, 0.0, 0.2, 0.5]);
    let xt = x.matmul(&t);
    for family in [GlmFamily::Gaussian, GlmFamily::BernoulliLogit] {
        let a = fit_qmle(family, &x, &y, &FitOptions::default()).unwrap();
        let b = fit_qmle(family, &xt, &y, &FitOptions::default()).unwrap();
        assert_relative_eq!(a.loglik, b.loglik, max_relative = 1e-9);
        let fa = x.mul_vec(&a.beta_hat);
        let fb = xt.mul_vec(&b.beta_hat);
        for (u, v) in fa.iter().zip(&fb) {
            assert!((u - v).abs() < 1e-7);
        }
    }
}

#[test]
fn collinear_design_is_rejected() {
    let x = normal_matrix(30, 2, 41);
    let mut cols: Vec<Vec<f64>> = (0..2).map(|j| x.col(j).to_vec()).collect();
    cols.push(cols[0].iter().zip(&cols[1]).map(|(a, b)| a - 2.0 * b).collect());
    let x = Matrix::from_columns(30, &cols);
    let y = normal_vec(30, 42);
    assert!(matches!(fit_qmle(GlmFamily::Gaussian, &x, &y, &FitOptions::default()), Err(Error::RankDeficient { .. })));
}

fn finite_difference_gradient(family: GlmFamily, x: &Matrix, y: &[f64], beta: &[f64]) -> Vec<f64> {
    let h = 1e-6;
    (0..beta.len())
        .map(|j| {
            let mut up = beta.to_vec();
            let mut down = beta.to_vec();
            up[j] += h;
            down[j] -= h;
            let f = |b: &[f64]| log_likelihood(family, x, y, b, 1.0).unwrap();
            (f(&up) - f(&down)) / (2.0 * h)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn score_is_the_loglik_gradient(seed in 0u64..10_000, b0 in -1.5f64..1.5, b1 in -1.5f64..1.5) {
        let x = normal_matrix(25, 2, seed);
        for family in [GlmFamily::Gaussian, GlmFamily::BernoulliLogit] {
            let y = simulate_glm(family, &x, &[0.4, -0.6], seed + 1);
            let beta = [b0, b1];
            let analytic = score(family, &x, &y, &beta).unwrap();
            let numeric = finite_difference_gradient(family, &x, &y, &beta);
            for (a, b) in analytic.iter().zip(&numeric) {
                prop_assert!((a - b).abs() <= 1e-5 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn loglik_is_concave_along_lines(seed in 0u64..10_000, t in 0.0f64..1.0) {
        let x = normal_matrix(30, 3, seed);
        let y = simulate_glm(GlmFamily::BernoulliLogit, &x, &[0.3, 0.3, -0.3], seed + 2);
        let a = normal_vec(3, seed + 3);
        let b = normal_vec(3, seed + 4);
        let mid: Vec<f64> = a.iter().zip(&b).map(|(u, v)| t * u + (1.0 - t) * v).collect();
        let f = |beta: &[f64]| log_likelihood(GlmFamily::BernoulliLogit, &x, &y, beta, 1.0).unwrap();
        prop_assert!(f(&mid) >= t * f(&a) + (1.0 - t) * f(&b) - 1e-9);
    }
}
