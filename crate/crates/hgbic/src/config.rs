//! TOML experiment configuration.
//!
//! Every key is optional at parse time; `simulate` and `sweep-zeta` require
//! `scenario`, `n`, `p`, `n_reps` and `base_seed`. Unknown keys are rejected.
//!
//! ```toml
//! scenario = "multiple_index"      # or "logistic_interaction"
//! n = 200
//! p = 100
//! n_reps = 100
//! base_seed = 20240601
//! criteria = ["aic", "bic", "gaic", "gbic", "gbic_p", "hgbic_p"]
//! zeta_grid = [0.5, 1.0, 1.5, 2.0]
//! test_size = 10000
//!
//! # candidate path
//! n_lambda = 100
//! lambda_min_ratio = 0.001
//! max_support = 50                 # default min(n / 2, 50)
//! tol_cd = 1e-7
//! max_passes = 1000
//! standardize = true
//! intercept = true                 # default: logistic yes, Gaussian no
//!
//! # refits
//! max_iter = 100
//! score_tol_per_obs = 1e-8
//! max_linear_predictor = 30.0
//! rank_tol = 1e-10
//! dispersion = 1.0                 # Gaussian τ, or "profile" for RSS/n
//! eig_floor = 1e-8
//! ```

use std::path::Path;

use hgbic_core::sim::{Scenario, SimulationConfig};
use hgbic_core::{CriterionKind, PipelineOptions};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Dispersion {
    Fixed(f64),
    Named(String),
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: Option<String>,
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub n_reps: Option<usize>,
    pub base_seed: Option<u64>,
    pub criteria: Option<Vec<String>>,
    pub zeta_grid: Option<Vec<f64>>,
    pub test_size: Option<usize>,

    pub n_lambda: Option<usize>,
    pub lambda_min_ratio: Option<f64>,
    pub max_support: Option<usize>,
    pub tol_cd: Option<f64>,
    pub max_passes: Option<usize>,
    pub standardize: Option<bool>,
    pub intercept: Option<bool>,

    pub max_iter: Option<usize>,
    pub score_tol_per_obs: Option<f64>,
    pub max_linear_predictor: Option<f64>,
    pub rank_tol: Option<f64>,
    pub dispersion: Option<Dispersion>,
    pub eig_floor: Option<f64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::usage(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn pipeline(&self) -> Result<PipelineOptions, CliError> {
        let mut o = PipelineOptions::default();
        let path = &mut o.path;
        if let Some(v) = self.n_lambda {
            path.n_lambda = v;
        }
        if let Some(v) = self.lambda_min_ratio {
            path.lambda_min_ratio = v;
        }
        if self.max_support.is_some() {
            path.max_support = self.max_support;
        }
        if let Some(v) = self.tol_cd {
            path.tol_cd = v;
        }
        if let Some(v) = self.max_passes {
            path.max_passes = v;
        }
        if let Some(v) = self.standardize {
            path.standardize = v;
        }
        if self.intercept.is_some() {
            path.intercept = self.intercept;
        }
        let fit = &mut o.fit;
        if let Some(v) = self.max_iter {
            fit.max_iter = v;
        }
        if let Some(v) = self.score_tol_per_obs {
            fit.score_tol_per_obs = v;
        }
        if let Some(v) = self.max_linear_predictor {
            fit.max_linear_predictor = v;
        }
        if let Some(v) = self.rank_tol {
            fit.rank_tol = v;
        }
        match &self.dispersion {
            None => {}
            Some(Dispersion::Fixed(tau)) if *tau > 0.0 && tau.is_finite() => fit.dispersion = Some(*tau),
            Some(Dispersion::Named(s)) if s == "profile" => fit.dispersion = None,
            Some(other) => return Err(CliError::usage(format!("invalid dispersion {other:?}"))),
        }
        if let Some(v) = self.eig_floor {
            o.eig_floor = v;
        }
        Ok(o)
    }

    pub fn simulation(&self) -> Result<SimulationConfig, CliError> {
        fn required<T: Copy>(v: Option<T>, key: &str) -> Result<T, CliError> {
            v.ok_or_else(|| CliError::usage(format!("config is missing `{key}`")))
        }
        let scenario: Scenario = self
            .scenario
            .as_deref()
            .ok_or_else(|| CliError::usage("config is missing `scenario`"))?
            .parse()
            .map_err(|e| CliError::from_core("scenario", e))?;
        let mut c = SimulationConfig::new(
            scenario,
            required(self.n, "n")?,
            required(self.p, "p")?,
            required(self.n_reps, "n_reps")?,
            required(self.base_seed, "base_seed")?,
        );
        if let Some(list) = &self.criteria {
            c.criteria = list
                .iter()
                .map(|s| s.parse::<CriterionKind>().map_err(|e| CliError::from_core(s, e)))
                .collect::<Result<_, _>>()?;
        }
        c.zeta_grid = self.zeta_grid.clone();
        if let Some(v) = self.test_size {
            c.test_size = v;
        }
        c.pipeline = self.pipeline()?;
        c.validate().map_err(|e| CliError::from_core("config", e))?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(ConfigFile::parse("n_lamda = 10"), Err(CliError::Usage(_))));
    }

    #[test]
    fn full_config_maps_one_to_one() {
        let c = ConfigFile::parse(
            r#"
            scenario = "logistic_interaction"
            n = 300
            p = 100
            n_reps = 7
            base_seed = 9
            criteria = ["bic", "hgbic_p_zeta=1.5"]
            zeta_grid = [1.0, 2.0]
            test_size = 500
            n_lambda = 40
            max_support = 20
            intercept = false
            dispersion = "profile"
            eig_floor = 1e-6
            "#,
        )
        .unwrap()
        .simulation()
        .unwrap();
        assert_eq!(c.scenario, Scenario::LogisticInteraction);
        assert_eq!((c.n, c.p, c.n_reps, c.base_seed, c.test_size), (300, 100, 7, 9, 500));
        assert_eq!(c.criteria, vec![CriterionKind::Bic, CriterionKind::HgbicPZeta(1.5)]);
        assert_eq!(c.zeta_grid, Some(vec![1.0, 2.0]));
        assert_eq!(c.pipeline.path.n_lambda, 40);
        assert_eq!(c.pipeline.path.max_support, Some(20));
        assert_eq!(c.pipeline.path.intercept, Some(false));
        assert_eq!(c.pipeline.fit.dispersion, None);
        assert_eq!(c.pipeline.eig_floor, 1e-6);
    }

    #[test]
    fn missing_required_key() {
        let err = ConfigFile::parse("scenario = \"multiple_index\"\nn = 10").unwrap().simulation().unwrap_err();
        assert!(err.to_string().contains("`p`"));
    }

    #[test]
    fn defaults_keep_unit_dispersion() {
        let o = ConfigFile::default().pipeline().unwrap();
        assert_eq!(o.fit.dispersion, Some(1.0));
        assert!(ConfigFile::parse("dispersion = \"sometimes\"").unwrap().pipeline().is_err());
    }
}
