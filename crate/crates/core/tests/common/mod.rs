#![allow(dead_code)]

use hgbic_core::sim::rng::Stream;
use hgbic_core::{Dataset, GlmFamily, Matrix};

pub fn normal_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut s = Stream::new(seed);
    let mut data = vec![0.0; rows * cols];
    s.fill_normal(&mut data);
    Matrix::from_col_major(rows, cols, data)
}

pub fn normal_vec(len: usize, seed: u64) -> Vec<f64> {
    let mut s = Stream::new(seed);
    let mut v = vec![0.0; len];
    s.fill_normal(&mut v);
    v
}

/// Response drawn from the working model itself at `beta`.
pub fn simulate_glm(family: GlmFamily, x: &Matrix, beta: &[f64], seed: u64) -> Vec<f64> {
    let mut s = Stream::new(seed);
    x.mul_vec(beta)
        .into_iter()
        .map(|t| match family {
            GlmFamily::Gaussian => t + s.normal(),
            GlmFamily::BernoulliLogit => f64::from(s.uniform() < family.mean(t)),
        })
        .collect()
}

pub fn gaussian_dataset(n: usize, p: usize, active: &[f64], seed: u64) -> Dataset {
    let x = normal_matrix(n, p, seed);
    let mut beta = vec![0.0; p];
    beta[..active.len()].copy_from_slice(active);
    let y = simulate_glm(GlmFamily::Gaussian, &x, &beta, seed ^ 0x5eed);
    Dataset::new(y, x).unwrap()
}

pub fn to_nalgebra(m: &Matrix) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_column_slice(m.nrows(), m.ncols(), m.as_col_major())
}
