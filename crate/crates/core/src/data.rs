use alloc::string::String;
use alloc::vec::Vec;

use crate::family::GlmFamily;
use crate::linalg::Matrix;
use crate::{Error, Result};

/// A response vector with its full `n × p` design.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    response: Vec<f64>,
    design: Matrix,
    column_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(response: Vec<f64>, design: Matrix) -> Result<Self> {
        if response.is_empty() {
            return Err(Error::Empty("response"));
        }
        if design.ncols() == 0 {
            return Err(Error::Empty("design"));
        }
        if design.nrows() != response.len() {
            return Err(Error::DimensionMismatch { expected: response.len(), found: design.nrows() });
        }
        if !design.is_finite() || response.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { response, design, column_names: None })
    }

    pub fn with_column_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.design.ncols() {
            return Err(Error::DimensionMismatch { expected: self.design.ncols(), found: names.len() });
        }
        self.column_names = Some(names);
        Ok(self)
    }

    /// Checks that every response entry is admissible for `family`.
    pub fn validate_for(&self, family: GlmFamily) -> Result<()> {
        match self.response.iter().position(|&y| !family.accepts_response(y)) {
            Some(index) => Err(Error::InvalidResponse { index, family: family.name() }),
            None => Ok(()),
        }
    }

    pub fn n(&self) -> usize {
        self.response.len()
    }

    pub fn p(&self) -> usize {
        self.design.ncols()
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn design(&self) -> &Matrix {
        &self.design
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }
}

/// A set of column indices into the full design, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ModelSupport {
    indices: Vec<usize>,
}

impl ModelSupport {
    /// Validates that `indices` are strictly increasing and below `p`.
    pub fn new(indices: Vec<usize>, p: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSupport("indices must be strictly increasing"));
        }
        if indices.last().is_some_and(|&last| last >= p) {
            return Err(Error::InvalidSupport("index out of range"));
        }
        Ok(Self { indices })
    }

    /// Sorts and deduplicates arbitrary indices.
    pub fn from_unsorted(mut indices: Vec<usize>, p: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        Self::new(indices, p)
    }

    /// `{0, 1, …, size − 1}`.
    pub fn leading(size: usize) -> Self {
        Self { indices: (0..size).collect() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.binary_search(&j).is_ok()
    }

    pub fn intersection_len(&self, other: &ModelSupport) -> usize {
        self.indices.iter().filter(|&&j| other.contains(j)).count()
    }

    pub fn is_superset_of(&self, other: &ModelSupport) -> bool {
        other.indices.iter().all(|&j| self.contains(j))
    }

    /// Number of indices in `self` but not in `other`.
    pub fn difference_len(&self, other: &ModelSupport) -> usize {
        self.len() - self.intersection_len(other)
    }
}

impl core::fmt::Display for ModelSupport {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for (k, j) in self.indices.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{j}")?;
        }
        Ok(())
    }
}
