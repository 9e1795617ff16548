//! Command-line interface: argument definitions and subcommand handlers.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use hgbic_core::pipeline::criterion_values;
use hgbic_core::{contrast, fit_support, CriterionKind, Dataset, GlmFamily, ModelSupport, PreparedCandidates};

use crate::config::ConfigFile;
use crate::dataset::read_dataset;
use crate::error::CliError;
use crate::report::{experiment_rows, sweep_rows, write_rows_to_path};
use crate::runner::{self, RunError};

#[derive(Debug, Parser)]
#[command(name = "hgbic", version, about = "Model selection for misspecified high-dimensional GLMs")]
pub struct Cli {
    /// Worker threads for simulations.
    #[arg(long, global = true, env = "HGBIC_WORKERS")]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Gaussian,
    Logit,
}

impl From<FamilyArg> for GlmFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Gaussian => GlmFamily::Gaussian,
            FamilyArg::Logit => GlmFamily::BernoulliLogit,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct InputArgs {
    /// Headered numeric CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Name of the response column; all other columns are covariates.
    #[arg(long, default_value = "y")]
    pub response: String,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub family: FamilyArg,
    /// TOML file with path and refit settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the working model on one support and print the fit.
    Fit {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated covariate names or zero-based indices.
        #[arg(long, value_delimiter = ',', required = true)]
        support: Vec<String>,
    },
    /// Build the Lasso candidate set and select with every criterion.
    Select {
        #[command(flatten)]
        input: InputArgs,
        /// Output directory for `candidates.csv` and `selection.csv`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a simulation experiment; writes `<config stem>.csv`.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides `base_seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Mean FDP and TPR of HGBIC_p over the `ζ` grid; writes `<config stem>_sweep.csv`.
    SweepZeta {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let workers = match cli.workers {
        Some(0) => return Err(CliError::usage("--workers must be positive")),
        Some(w) => w,
        None => runner::default_workers(),
    };
    match cli.command {
        Command::Fit { input, support } => fit(&input, &support),
        Command::Select { input, out } => select(&input, &out),
        Command::Simulate { config, out, seed } => simulate(&config, &out, seed, workers),
        Command::SweepZeta { config, out, seed } => sweep_zeta(&config, &out, seed, workers),
    }
}

fn run_error(e: RunError) -> CliError {
    match e {
        RunError::Pool(e) => CliError::Numerical(e.to_string()),
        RunError::Core(e) => CliError::from_core("simulation", e),
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("cannot write {}: {e}", path.display()))
}

fn load_input(input: &InputArgs) -> Result<(Dataset, hgbic_core::PipelineOptions), CliError> {
    let options = match &input.config {
        Some(path) => ConfigFile::load(path)?.pipeline()?,
        None => ConfigFile::default().pipeline()?,
    };
    let ds = read_dataset(&input.input, &input.response, input.family.into())?;
    Ok((ds, options))
}

fn column_name(ds: &Dataset, j: usize) -> String {
    ds.column_names().map_or_else(|| j.to_string(), |names| names[j].clone())
}

fn support_label(ds: &Dataset, support: &ModelSupport) -> String {
    support.indices().iter().map(|&j| column_name(ds, j)).collect::<Vec<_>>().join(" ")
}

/// Resolves covariate names or zero-based indices into a support.
pub fn parse_support(ds: &Dataset, items: &[String]) -> Result<ModelSupport, CliError> {
    let indices = items
        .iter()
        .map(|item| {
            let by_name = ds.column_names().and_then(|names| names.iter().position(|n| n == item));
            by_name
                .or_else(|| item.parse::<usize>().ok())
                .ok_or_else(|| CliError::usage(format!("unknown covariate `{item}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ModelSupport::from_unsorted(indices, ds.p()).map_err(|e| CliError::usage(format!("support: {e}")))
}

fn fit(input: &InputArgs, items: &[String]) -> Result<(), CliError> {
    let (ds, options) = load_input(input)?;
    let family: GlmFamily = input.family.into();
    let support = parse_support(&ds, items)?;
    let fit_opts = options.fit_options(family);
    let fit = fit_support(family, &ds, &support, &fit_opts).map_err(|e| CliError::from_core("fit", e))?;
    let sub = ds.design().select_columns(support.indices());
    let contrast = contrast::estimate_for_fit(family, &sub, ds.response(), &fit, options.eig_floor)
        .map_err(|e| CliError::from_core("contrast", e))?;

    let mut out = std::io::stdout().lock();
    let mut print = || -> std::io::Result<()> {
        writeln!(out, "family\t{}", family.name())?;
        writeln!(out, "n\t{}", ds.n())?;
        writeln!(out, "support_size\t{}", support.len())?;
        if let Some(b) = fit.intercept {
            writeln!(out, "coef\t(intercept)\t{b}")?;
        }
        for (&j, &b) in support.indices().iter().zip(&fit.beta_hat) {
            writeln!(out, "coef\t{}\t{b}", column_name(&ds, j))?;
        }
        writeln!(out, "loglik\t{}", fit.loglik)?;
        writeln!(out, "dispersion\t{}", fit.dispersion_hat)?;
        writeln!(out, "iterations\t{}", fit.iterations)?;
        writeln!(out, "converged\t{}", fit.converged)?;
        writeln!(out, "score_sup_norm\t{:e}", fit.score_sup_norm)?;
        writeln!(out, "separation\t{}", fit.separation_flag)?;
        writeln!(out, "trace_h\t{}", contrast.trace_h)?;
        writeln!(out, "logdet_h\t{}", contrast.logdet_h)?;
        writeln!(out, "clamped\t{}", contrast.clamped)
    };
    print().map_err(|e| CliError::Data(format!("cannot write output: {e}")))
}

fn select(input: &InputArgs, out_dir: &Path) -> Result<(), CliError> {
    let (ds, options) = load_input(input)?;
    let family: GlmFamily = input.family.into();
    let prepared =
        PreparedCandidates::build(family, &ds, &options).map_err(|e| CliError::from_core("candidate path", e))?;
    let kinds = CriterionKind::STANDARD;
    let values = kinds
        .iter()
        .map(|&k| criterion_values(k, &prepared.candidates, prepared.n, prepared.p))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::from_core("criteria", e))?;
    std::fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;

    let path = out_dir.join("candidates.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| io_error(&path, e))?;
    let mut header: Vec<String> = ["index", "size", "support", "loglik", "trace_h", "logdet_h", "clamped", "rejection"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(kinds.iter().map(|k| k.label()));
    w.write_record(&header).map_err(|e| io_error(&path, e))?;
    for (i, c) in prepared.candidates.iter().enumerate() {
        let opt = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
        let mut record = vec![
            i.to_string(),
            c.support.len().to_string(),
            support_label(&ds, &c.support),
            opt(c.fit.as_ref().map(|f| f.loglik)),
            opt(c.contrast.as_ref().map(|h| h.trace_h)),
            opt(c.contrast.as_ref().map(|h| h.logdet_h)),
            c.contrast.as_ref().map_or_else(String::new, |h| h.clamped.to_string()),
            c.rejection.as_ref().map_or_else(String::new, |r| r.to_string()),
        ];
        record.extend(values.iter().map(|v| opt(v[i].map(|v| v.value))));
        w.write_record(&record).map_err(|e| io_error(&path, e))?;
    }
    w.flush().map_err(|e| io_error(&path, e))?;

    let path = out_dir.join("selection.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| io_error(&path, e))?;
    w.write_record(["criterion", "index", "size", "support", "value", "tie_break"]).map_err(|e| io_error(&path, e))?;
    for &kind in &kinds {
        let s = prepared.select(kind).map_err(|e| CliError::from_core(&kind.label(), e))?;
        let support = &prepared.candidates[s.chosen_index].support;
        let label = support_label(&ds, support);
        println!("{}\t{}\t{{{label}}}", kind.label(), s.chosen_index);
        w.write_record([
            kind.label(),
            s.chosen_index.to_string(),
            support.len().to_string(),
            label,
            s.chosen_value().value.to_string(),
            s.tie_break_used.to_string(),
        ])
        .map_err(|e| io_error(&path, e))?;
    }
    w.flush().map_err(|e| io_error(&path, e))
}

fn output_path(config: &Path, out_dir: &Path, suffix: &str) -> Result<PathBuf, CliError> {
    let stem = config
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| CliError::usage(format!("config path {} has no file stem", config.display())))?;
    std::fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;
    Ok(out_dir.join(format!("{stem}{suffix}.csv")))
}

fn load_simulation(config: &Path, seed: Option<u64>) -> Result<hgbic_core::sim::SimulationConfig, CliError> {
    let mut file = ConfigFile::load(config)?;
    if seed.is_some() {
        file.base_seed = seed;
    }
    file.simulation()
}

fn simulate(config: &Path, out_dir: &Path, seed: Option<u64>, workers: usize) -> Result<(), CliError> {
    let sim = load_simulation(config, seed)?;
    let report = runner::run_experiment(&sim, workers).map_err(run_error)?;
    let path = output_path(config, out_dir, "")?;
    write_rows_to_path(&path, &experiment_rows(&report)).map_err(|e| io_error(&path, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn sweep_zeta(config: &Path, out_dir: &Path, seed: Option<u64>, workers: usize) -> Result<(), CliError> {
    let sim = load_simulation(config, seed)?;
    if sim.zeta_grid.as_ref().is_none_or(|g| g.is_empty()) {
        return Err(CliError::usage("sweep-zeta needs a non-empty `zeta_grid`"));
    }
    let points = runner::zeta_sweep(&sim, workers).map_err(run_error)?;
    let path = output_path(config, out_dir, "_sweep")?;
    write_rows_to_path(&path, &sweep_rows(&points)).map_err(|e| io_error(&path, e))?;
    println!("wrote {}", path.display());
    Ok(())
}
