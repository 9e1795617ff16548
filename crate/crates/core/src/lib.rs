//! Model selection for high-dimensional misspecified generalized linear
//! models: quasi-maximum-likelihood fits, covariance-contrast estimates,
//! information criteria, Lasso candidate paths and a simulation benchmark.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod contrast;
pub mod criteria;
pub mod data;
pub mod error;
pub mod family;
pub mod glm;
pub mod linalg;
pub mod math;
pub mod path;
pub mod pipeline;
pub mod sim;

pub use contrast::{contrast_summary, estimate_a, estimate_b, ContrastEstimate};
pub use criteria::{evaluate, select, CriterionKind, CriterionValue, SelectionResult};
pub use data::{Dataset, ModelSupport};
pub use error::{Error, Result};
pub use family::GlmFamily;
pub use glm::{fit_qmle, fit_support, FitOptions, FitResult};
pub use linalg::Matrix;
pub use path::{lasso_path, CandidateSequence, LassoPathConfig};
pub use pipeline::{AssessedCandidate, PipelineOptions, PreparedCandidates};
