//! Per-replication scores of a selected model.

use crate::data::ModelSupport;
use crate::glm::FitResult;
use crate::math::sigmoid;
use crate::{Error, Result};

use super::scenario::{Scenario, TestSample};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionScore {
    pub consistent: bool,
    pub sure: bool,
    pub false_positives: usize,
    pub fdp: f64,
    pub tpr: f64,
}

/// Compares a selected support against the oracle support.
pub fn score_selection(selected: &ModelSupport, oracle: &ModelSupport) -> SelectionScore {
    let false_positives = selected.difference_len(oracle);
    let hits = selected.intersection_len(oracle);
    SelectionScore {
        consistent: selected == oracle,
        sure: selected.is_superset_of(oracle),
        false_positives,
        fdp: false_positives as f64 / selected.len().max(1) as f64,
        tpr: if oracle.is_empty() { 1.0 } else { hits as f64 / oracle.len() as f64 },
    }
}

/// Mean squared prediction error (multiple index) or misclassification rate
/// at threshold ½ (logistic interaction) of `fit` on the test sample.
pub fn test_error(fit: &FitResult, test: &TestSample, scenario: Scenario) -> Result<f64> {
    let rows = test.rows();
    if rows == 0 {
        return Err(Error::Empty("test set"));
    }
    let mut columns = alloc::vec::Vec::with_capacity(fit.support.len());
    for &j in fit.support.indices() {
        columns.push(test.column(j).ok_or(Error::InvalidSupport("test column not drawn"))?);
    }
    let mut total = 0.0;
    for i in 0..rows {
        let mut eta = fit.intercept.unwrap_or(0.0);
        for (col, &b) in columns.iter().zip(&fit.beta_hat) {
            eta += b * col[i];
        }
        let y = test.response[i];
        total += match scenario {
            Scenario::MultipleIndex => (y - eta) * (y - eta),
            Scenario::LogisticInteraction => {
                let predicted = if sigmoid(eta) > 0.5 { 1.0 } else { 0.0 };
                if predicted != y {
                    1.0
                } else {
                    0.0
                }
            }
        };
    }
    Ok(total / rows as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationMetrics {
    pub selection: SelectionScore,
    pub test_error: f64,
}

pub fn compute_metrics(
    selected: &ModelSupport,
    oracle: &ModelSupport,
    fit: &FitResult,
    test: &TestSample,
    scenario: Scenario,
) -> Result<ReplicationMetrics> {
    Ok(ReplicationMetrics {
        selection: score_selection(selected, oracle),
        test_error: test_error(fit, test, scenario)?,
    })
}
