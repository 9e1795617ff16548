//! The two misspecified benchmark designs.
//!
//! Both draw an `n × p` design with i.i.d. standard normal entries and make
//! the response depend on the first five covariates only:
//!
//! * multiple index: `Y = f(β₁X₁) + f(β₂X₂ + β₃X₃) + f(β₄X₄ + β₅X₅) + ε` with
//!   `f(x) = x³/(x² + 1)` and `ε ~ N(0, σ²)`, fitted by a linear working model;
//! * logistic interaction: `θ = zᵀβ + 2z₁z₂ + 2z₃z₄`, `Y ~ Bernoulli(σ(θ))`,
//!   fitted by a logistic working model without the interaction columns.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::rng::{Stream, StreamKind};
use crate::data::{Dataset, ModelSupport};
use crate::family::GlmFamily;
use crate::linalg::Matrix;
use crate::math::sigmoid;
use crate::{Error, Result};

/// Number of covariates that drive the response.
pub const SIGNAL_SIZE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    MultipleIndex,
    LogisticInteraction,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::MultipleIndex => "multiple_index",
            Scenario::LogisticInteraction => "logistic_interaction",
        }
    }

    /// Family of the working model fitted to this scenario.
    pub fn working_family(self) -> GlmFamily {
        match self {
            Scenario::MultipleIndex => GlmFamily::Gaussian,
            Scenario::LogisticInteraction => GlmFamily::BernoulliLogit,
        }
    }
}

impl core::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multiple_index" => Ok(Scenario::MultipleIndex),
            "logistic_interaction" => Ok(Scenario::LogisticInteraction),
            _ => Err(Error::InvalidConfig("unknown scenario")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrueModelSpec {
    pub scenario: Scenario,
    pub beta0: Vec<f64>,
    /// Noise standard deviation (multiple index only).
    pub sigma: f64,
    pub oracle_support: ModelSupport,
}

impl TrueModelSpec {
    pub fn for_scenario(scenario: Scenario, p: usize) -> Result<Self> {
        if p < SIGNAL_SIZE {
            return Err(Error::InvalidConfig("p must be at least 5"));
        }
        let head: [f64; SIGNAL_SIZE] = match scenario {
            Scenario::MultipleIndex => [1.0, -1.0, 1.0, 1.0, -1.0],
            Scenario::LogisticInteraction => [2.5, -1.9, 2.8, -2.2, 3.0],
        };
        let mut beta0 = vec![0.0; p];
        beta0[..SIGNAL_SIZE].copy_from_slice(&head);
        let sigma = match scenario {
            Scenario::MultipleIndex => 0.8,
            Scenario::LogisticInteraction => 0.0,
        };
        Ok(Self { scenario, beta0, sigma, oracle_support: ModelSupport::leading(SIGNAL_SIZE) })
    }

    /// Noiseless signal `E[Y | z]` for multiple index, or the natural parameter
    /// `θ` for logistic interaction, given the first five covariates.
    pub fn signal(&self, z: &[f64; SIGNAL_SIZE]) -> f64 {
        let b = &self.beta0;
        match self.scenario {
            Scenario::MultipleIndex => {
                index_link(b[0] * z[0]) + index_link(b[1] * z[1] + b[2] * z[2]) + index_link(b[3] * z[3] + b[4] * z[4])
            }
            Scenario::LogisticInteraction => {
                let linear: f64 = b[..SIGNAL_SIZE].iter().zip(z).map(|(b, z)| b * z).sum();
                linear + 2.0 * z[0] * z[1] + 2.0 * z[2] * z[3]
            }
        }
    }

    /// `E[Y | z]` on the response scale.
    pub fn mean_response(&self, z: &[f64; SIGNAL_SIZE]) -> f64 {
        match self.scenario {
            Scenario::MultipleIndex => self.signal(z),
            Scenario::LogisticInteraction => sigmoid(self.signal(z)),
        }
    }
}

/// `f(x) = x³ / (x² + 1)`.
pub fn index_link(x: f64) -> f64 {
    x * x * x / (x * x + 1.0)
}

/// Which split of the replication a sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    fn design_stream(self) -> StreamKind {
        match self {
            Split::Train => StreamKind::TrainDesign,
            Split::Test => StreamKind::TestDesign,
        }
    }

    fn noise_stream(self) -> StreamKind {
        match self {
            Split::Train => StreamKind::TrainNoise,
            Split::Test => StreamKind::TestNoise,
        }
    }
}

/// Column `j` of a split: `rows` standard normals from its own stream.
pub fn design_column(seed: u64, split: Split, j: usize, rows: usize) -> Vec<f64> {
    let mut col = vec![0.0; rows];
    Stream::for_purpose(seed, split.design_stream(), j as u64).fill_normal(&mut col);
    col
}

fn responses(spec: &TrueModelSpec, seed: u64, split: Split, signal_cols: &[Vec<f64>]) -> Vec<f64> {
    let rows = signal_cols[0].len();
    let mut noise = Stream::for_purpose(seed, split.noise_stream(), 0);
    (0..rows)
        .map(|i| {
            let z: [f64; SIGNAL_SIZE] = core::array::from_fn(|k| signal_cols[k][i]);
            match spec.scenario {
                Scenario::MultipleIndex => spec.signal(&z) + spec.sigma * noise.normal(),
                Scenario::LogisticInteraction => {
                    if noise.uniform() < sigmoid(spec.signal(&z)) {
                        1.0
                    } else {
                        0.0
                    }
                }
            }
        })
        .collect()
}

/// Draws a full split (all `p` columns).
pub fn generate(spec: &TrueModelSpec, rows: usize, seed: u64, split: Split) -> Result<Dataset> {
    let p = spec.beta0.len();
    if rows == 0 {
        return Err(Error::Empty("rows"));
    }
    let columns: Vec<Vec<f64>> = (0..p).map(|j| design_column(seed, split, j, rows)).collect();
    let y = responses(spec, seed, split, &columns[..SIGNAL_SIZE]);
    Dataset::new(y, Matrix::from_columns(rows, &columns))
}

/// Multiple-index training set of size `n` and a test set of `test_size`.
pub fn generate_multiple_index(n: usize, p: usize, seed: u64, test_size: usize) -> Result<(Dataset, Dataset)> {
    let spec = TrueModelSpec::for_scenario(Scenario::MultipleIndex, p)?;
    Ok((generate(&spec, n, seed, Split::Train)?, generate(&spec, test_size, seed, Split::Test)?))
}

/// Logistic-interaction training set of size `n` and a test set of `test_size`.
pub fn generate_logistic_interaction(n: usize, p: usize, seed: u64, test_size: usize) -> Result<(Dataset, Dataset)> {
    let spec = TrueModelSpec::for_scenario(Scenario::LogisticInteraction, p)?;
    Ok((generate(&spec, n, seed, Split::Train)?, generate(&spec, test_size, seed, Split::Test)?))
}

/// A test sample holding only the columns that some fitted model uses.
///
/// Columns are drawn from the same per-column streams as [`generate`], so a
/// partial sample agrees entry-for-entry with the full one.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSample {
    pub response: Vec<f64>,
    pub columns: BTreeMap<usize, Vec<f64>>,
}

impl TestSample {
    pub fn draw(spec: &TrueModelSpec, rows: usize, seed: u64, needed: impl IntoIterator<Item = usize>) -> Result<Self> {
        if rows == 0 {
            return Err(Error::Empty("test rows"));
        }
        let p = spec.beta0.len();
        let mut columns = BTreeMap::new();
        for j in (0..SIGNAL_SIZE).chain(needed) {
            if j >= p {
                return Err(Error::InvalidSupport("test column out of range"));
            }
            columns.entry(j).or_insert_with(|| design_column(seed, Split::Test, j, rows));
        }
        let signal: Vec<Vec<f64>> = (0..SIGNAL_SIZE).map(|j| columns[&j].clone()).collect();
        let response = responses(spec, seed, Split::Test, &signal);
        Ok(Self { response, columns })
    }

    pub fn from_dataset(ds: &Dataset) -> Self {
        let columns = (0..ds.p()).map(|j| (j, ds.design().col(j).to_vec())).collect();
        Self { response: ds.response().to_vec(), columns }
    }

    pub fn rows(&self) -> usize {
        self.response.len()
    }

    pub fn column(&self, j: usize) -> Option<&[f64]> {
        self.columns.get(&j).map(|c| c.as_slice())
    }
}
