//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::path::Path;
use std::process::Command;

use hgbic::runner::{default_workers, run_experiment};
use hgbic_core::contrast::{contrast_summary, estimate_for_fit};
use hgbic_core::criteria::evaluate_terms;
use hgbic_core::path::{compute_path, LassoPath};
use hgbic_core::sim::rng::{mix_seed, Stream};
use hgbic_core::sim::{estimate_pseudo_true, MetricsReport, Scenario, SimulationConfig};
use hgbic_core::{
    fit_qmle, AssessedCandidate, CriterionKind, Dataset, FitOptions, GlmFamily, LassoPathConfig, Matrix,
    PipelineOptions, PreparedCandidates,
};

const BASE_SEED: u64 = 2024;
const REPS: usize = 100;

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: &'static str, checks: &[(bool, String)]) -> Outcome {
    let pass = checks.iter().all(|(ok, _)| *ok);
    let detail =
        checks.iter().map(|(ok, s)| format!("{}{s}", if *ok { "" } else { "!" })).collect::<Vec<_>>().join("; ");
    Outcome { id, pass, detail }
}

fn check(ok: bool, msg: String) -> (bool, String) {
    (ok, msg)
}

fn experiment(
    scenario: Scenario,
    n: usize,
    p: usize,
    criteria: Vec<CriterionKind>,
    zeta: Option<Vec<f64>>,
) -> MetricsReport {
    let mut c = SimulationConfig::new(scenario, n, p, REPS, BASE_SEED);
    c.criteria = criteria;
    c.zeta_grid = zeta;
    run_experiment(&c, default_workers()).expect("experiment runs")
}

fn summary(r: &MetricsReport, kind: CriterionKind) -> &hgbic_core::sim::experiment::CriterionSummary {
    r.criteria.iter().find(|s| s.kind == kind).expect("criterion present")
}

fn pct(rate: f64) -> f64 {
    100.0 * rate
}

fn criterion_1(r: &MetricsReport) -> Outcome {
    let h = pct(summary(r, CriterionKind::HgbicP).consistent_rate);
    let g = pct(summary(r, CriterionKind::GbicP).consistent_rate);
    let b = pct(summary(r, CriterionKind::Bic).consistent_rate);
    let a = pct(summary(r, CriterionKind::Aic).consistent_rate);
    let mut checks = vec![
        check(h >= 95.0, format!("HGBIC_p consistent {h:.0}% >= 95")),
        check((77.0..=100.0).contains(&g), format!("GBIC_p consistent {g:.0}% in [77,100]")),
        check((56.0..=86.0).contains(&b), format!("BIC consistent {b:.0}% in [56,86]")),
        check(a <= 10.0, format!("AIC consistent {a:.0}% <= 10")),
    ];
    for s in &r.criteria {
        let sure = pct(s.sure_rate);
        checks.push(check(sure == 100.0, format!("{} sure {sure:.0}%", s.kind.label())));
    }
    outcome("1", &checks)
}

fn criterion_2(r: &MetricsReport) -> Outcome {
    let h = summary(r, CriterionKind::HgbicP);
    let g = pct(summary(r, CriterionKind::GbicP).consistent_rate);
    let err = h.error.mean;
    let oracle = r.oracle.expect("oracle error").mean;
    outcome(
        "2",
        &[
            check(pct(h.consistent_rate) >= 95.0, format!("HGBIC_p consistent {:.0}% >= 95", pct(h.consistent_rate))),
            check((42.0..=72.0).contains(&g), format!("GBIC_p consistent {g:.0}% in [42,72]")),
            check((err - 0.83).abs() <= 0.05, format!("HGBIC_p error {err:.4} in 0.83±0.05")),
            check((err - oracle).abs() <= 0.01, format!("|HGBIC_p − oracle| = {:.4} <= 0.01", (err - oracle).abs())),
        ],
    )
}

fn criterion_3(p100: &MetricsReport, p400: &MetricsReport, p1600: &MetricsReport) -> Outcome {
    let mut checks: Vec<(bool, String)> = [p100, p400, p1600]
        .iter()
        .map(|r| {
            let fp = summary(r, CriterionKind::HgbicP).mean_false_positives;
            check(fp <= 0.05, format!("HGBIC_p FP {fp:.3} at p={}", r.p))
        })
        .collect();
    let aic = summary(p100, CriterionKind::Aic).mean_false_positives;
    checks.push(check(aic >= 5.0, format!("AIC FP {aic:.2} >= 5 at p=100")));
    outcome("3", &checks)
}

fn criterion_4(r: &MetricsReport) -> Outcome {
    let h = summary(r, CriterionKind::HgbicP);
    let g = pct(summary(r, CriterionKind::GbicP).consistent_rate);
    let err = pct(h.error.mean);
    outcome(
        "4",
        &[
            check(pct(h.consistent_rate) >= 90.0, format!("HGBIC_p consistent {:.0}% >= 90", pct(h.consistent_rate))),
            check((err - 15.2).abs() <= 1.5, format!("HGBIC_p classification error {err:.2}% in 15.2±1.5")),
            check((40.0..=70.0).contains(&g), format!("GBIC_p consistent {g:.0}% in [40,70]")),
        ],
    )
}

fn criterion_5(r: &MetricsReport) -> Outcome {
    let checks: Vec<(bool, String)> = r
        .fdp_tpr_curve
        .as_ref()
        .expect("sweep present")
        .iter()
        .map(|z| {
            check(
                z.mean_fdp <= 0.05 && z.mean_tpr >= 0.95,
                format!("ζ={}: FDP {:.3}, TPR {:.3}", z.zeta, z.mean_fdp, z.mean_tpr),
            )
        })
        .collect();
    outcome("5", &checks)
}

fn criterion_6(ran_p800: bool) -> Outcome {
    outcome("6", &[check(ran_p800, "p=3200 rows replaced by the p<=800 checks of criteria 1-3".into())])
}

fn normal_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut data = vec![0.0; rows * cols];
    Stream::new(seed).fill_normal(&mut data);
    Matrix::from_col_major(rows, cols, data)
}

fn draw_response(family: GlmFamily, x: &Matrix, beta: &[f64], seed: u64) -> Vec<f64> {
    let mut s = Stream::new(seed);
    x.mul_vec(beta)
        .into_iter()
        .map(|t| match family {
            GlmFamily::Gaussian => t + s.normal(),
            GlmFamily::BernoulliLogit => f64::from(s.uniform() < family.mean(t)),
        })
        .collect()
}

fn nalgebra_ols(x: &Matrix, y: &[f64]) -> Vec<f64> {
    let xn = nalgebra::DMatrix::from_column_slice(x.nrows(), x.ncols(), x.as_col_major());
    let yn = nalgebra::DVector::from_column_slice(y);
    xn.svd(true, true).solve(&yn, 1e-14).expect("svd solve").iter().copied().collect()
}

fn kkt_worst(path: &LassoPath, ds: &Dataset) -> f64 {
    let (n, p) = (ds.n(), ds.p());
    let mut worst: f64 = 0.0;
    for (k, pt) in path.points.iter().enumerate() {
        if path.skipped.contains(&k) {
            continue;
        }
        let resid: Vec<f64> = (0..n)
            .map(|i| {
                let eta = pt.intercept + (0..p).map(|j| ds.design().get(i, j) * pt.coefficients[j]).sum::<f64>();
                ds.response()[i] - path.family.mean(eta)
            })
            .collect();
        if path.intercept {
            worst = worst.max((resid.iter().sum::<f64>() / n as f64).abs());
        }
        for j in 0..p {
            let g = ds.design().col(j).iter().zip(&resid).map(|(x, r)| x * r).sum::<f64>()
                / (n as f64 * path.column_scale[j]);
            let b = pt.coefficients[j];
            let v = if b == 0.0 { (g.abs() - pt.lambda).max(0.0) } else { (g - pt.lambda * b.signum()).abs() };
            worst = worst.max(v);
        }
    }
    worst
}

fn hgbic_penalty(c: &AssessedCandidate, n: usize, p: usize) -> Option<f64> {
    let (fit, h) = (c.fit.as_ref()?, c.contrast.as_ref()?);
    let v = evaluate_terms(CriterionKind::HgbicP, fit.loglik, fit.support.len(), h.trace_h, h.logdet_h, n, p).ok()?;
    Some(v.components.complexity_penalty + v.components.misspec_penalty)
}

fn criterion_7() -> Outcome {
    let mut checks = Vec::new();

    let mut ols_gap: f64 = 0.0;
    let mut score_ok = true;
    let mut excess_ok = true;
    for seed in 0..10u64 {
        let (n, d) = (60 + 10 * seed as usize, 2 + seed as usize % 5);
        let x = normal_matrix(n, d, mix_seed(7, seed));
        let beta: Vec<f64> = (0..d).map(|k| 0.6 - 0.3 * k as f64).collect();
        let y = draw_response(GlmFamily::Gaussian, &x, &beta, mix_seed(8, seed));
        let fit = fit_qmle(GlmFamily::Gaussian, &x, &y, &FitOptions::default()).expect("ols fit");
        for (a, b) in fit.beta_hat.iter().zip(nalgebra_ols(&x, &y)) {
            ols_gap = ols_gap.max((a - b).abs());
        }
        let yl = draw_response(GlmFamily::BernoulliLogit, &x, &beta, mix_seed(9, seed));
        if let Ok(fl) = fit_qmle(GlmFamily::BernoulliLogit, &x, &yl, &FitOptions::default()) {
            if fl.converged {
                score_ok &= fl.score_sup_norm <= 1e-8 * n as f64;
            }
            let h = estimate_for_fit(GlmFamily::BernoulliLogit, &x, &yl, &fl, 1e-8).expect("contrast");
            if !h.clamped {
                excess_ok &= h.trace_h - h.logdet_h >= d as f64 - 1e-9;
            }
        }
    }
    checks.push(check(ols_gap <= 1e-8, format!("QMLE vs OLS max gap {ols_gap:.1e}")));
    checks.push(check(score_ok, "score sup-norm <= 1e-8·n at convergence".into()));
    checks.push(check(excess_ok, "tr − logdet >= d on unclamped estimates".into()));

    let a = normal_matrix(30, 6, 77).gram();
    let h = contrast_summary(&a, &a, 1e-8).expect("identity contrast");
    let gap = (h.trace_h - h.logdet_h - 6.0).abs();
    checks.push(check(gap <= 1e-10, format!("H = I gives tr − logdet = d within {gap:.1e}")));

    let mut kkt: f64 = 0.0;
    for seed in 0..3u64 {
        let x = normal_matrix(80, 20, mix_seed(10, seed));
        let mut beta = vec![0.0; 20];
        beta[..3].copy_from_slice(&[1.2, -0.8, 0.5]);
        for family in [GlmFamily::Gaussian, GlmFamily::BernoulliLogit] {
            let y = draw_response(family, &x, &beta, mix_seed(11, seed));
            let ds = Dataset::new(y, x.clone()).expect("dataset");
            let path = compute_path(family, &ds, &LassoPathConfig::default()).expect("path");
            kkt = kkt.max(kkt_worst(&path, &ds));
        }
    }
    checks.push(check(kkt <= 1e-5, format!("Lasso KKT residual {kkt:.1e}")));

    let grid = [0.25, 0.5, 1.0, 2.0, 4.0];
    let (mut instances, mut nested) = (0, true);
    for seed in 0..200u64 {
        if instances == 20 {
            break;
        }
        let x = normal_matrix(60, 40, mix_seed(12, seed));
        let mut beta = vec![0.0; 40];
        beta[..4].copy_from_slice(&[0.8, -0.6, 0.5, 0.3]);
        let y = draw_response(GlmFamily::Gaussian, &x, &beta, mix_seed(13, seed));
        let ds = Dataset::new(y, x).expect("dataset");
        let prep = PreparedCandidates::build(GlmFamily::Gaussian, &ds, &PipelineOptions::default()).expect("pipeline");
        let pens: Vec<(usize, f64)> = prep
            .candidates
            .iter()
            .filter(|c| c.rejection.is_none())
            .filter_map(|c| Some((c.support.len(), hgbic_penalty(c, prep.n, prep.p)?)))
            .collect();
        if !pens.iter().all(|&(da, pa)| pens.iter().all(|&(db, pb)| da >= db || pa < pb)) {
            continue;
        }
        instances += 1;
        let sizes: Vec<usize> = grid
            .iter()
            .map(|&z| {
                prep.candidates[prep.select(CriterionKind::HgbicPZeta(z)).expect("select").chosen_index].support.len()
            })
            .collect();
        nested &= sizes.windows(2).all(|w| w[1] <= w[0]);
    }
    checks.push(check(nested && instances == 20, format!("size non-increasing in ζ on {instances} instances")));

    let x = normal_matrix(500, 3, 14);
    let beta = [0.9, -1.3, 0.4];
    let ey: Vec<f64> = x.mul_vec(&beta).iter().map(|&t| GlmFamily::BernoulliLogit.mean(t)).collect();
    let got = estimate_pseudo_true(GlmFamily::BernoulliLogit, &x, &ey).expect("pseudo-true");
    let gap = got.iter().zip(&beta).map(|(g, b)| (g - b).abs()).fold(0.0, f64::max);
    checks.push(check(gap <= 1e-8, format!("pseudo-true recovery gap {gap:.1e}")));

    outcome("7", &checks)
}

fn mean_trace_gap(n: usize) -> f64 {
    let beta = [0.8, -0.5, 0.6];
    let reps = 50u64;
    let total: f64 = (0..reps)
        .map(|r| {
            let seed = mix_seed(mix_seed(BASE_SEED, n as u64), r);
            let x = normal_matrix(n, 3, seed);
            let y = draw_response(GlmFamily::BernoulliLogit, &x, &beta, seed ^ 0xa5a5);
            let fit = fit_qmle(GlmFamily::BernoulliLogit, &x, &y, &FitOptions::default()).expect("fit");
            let h = estimate_for_fit(GlmFamily::BernoulliLogit, &x, &y, &fit, 1e-8).expect("contrast");
            (h.trace_h - 3.0).abs()
        })
        .sum();
    total / reps as f64
}

fn criterion_8() -> Outcome {
    let gaps: Vec<f64> = [500, 2000, 8000].into_iter().map(mean_trace_gap).collect();
    outcome(
        "8",
        &[
            check(gaps.windows(2).all(|w| w[1] < w[0]), format!("mean |tr(H)−3| = {gaps:.4?} decreasing")),
            check(gaps[2] <= 0.15, format!("{:.4} <= 0.15 at n=8000", gaps[2])),
        ],
    )
}

fn run_cli(args: &[&str], workers: usize) -> bool {
    Command::new(env!("CARGO_BIN_EXE_hgbic"))
        .args(args)
        .env("HGBIC_WORKERS", workers.to_string())
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg = dir.path().join("det.toml");
    std::fs::write(
        &cfg,
        "scenario = \"logistic_interaction\"\nn = 120\np = 60\nn_reps = 16\nbase_seed = 77\n\
         zeta_grid = [0.5, 1.0, 2.0]\ntest_size = 2000\n",
    )
    .expect("write config");
    let cfg = cfg.to_str().expect("utf-8 path");
    let mut checks = Vec::new();
    for (cmd, file) in [("simulate", "det.csv"), ("sweep-zeta", "det_sweep.csv")] {
        let outputs: Vec<Option<Vec<u8>>> = [1usize, 4]
            .iter()
            .map(|&w| {
                let out = dir.path().join(format!("{cmd}_w{w}"));
                let out_s = out.to_str().expect("utf-8 path");
                run_cli(&[cmd, "--config", cfg, "--out", out_s], w).then(|| read(&out.join(file)))
            })
            .collect();
        let same = matches!(&outputs[..], [Some(a), Some(b)] if a == b && !a.is_empty());
        checks.push(check(same, format!("{cmd}: identical bytes at workers 1 and 4")));
    }
    outcome("9", &checks)
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_default()
}

fn main() {
    let mi = Scenario::MultipleIndex;
    let standard = CriterionKind::STANDARD.to_vec();
    let p100 = experiment(mi, 200, 100, standard.clone(), None);
    let p800 = experiment(mi, 200, 800, standard.clone(), None);
    let p400 = experiment(mi, 200, 400, vec![CriterionKind::HgbicP], Some(vec![1.0, 1.5, 2.0]));
    let p1600 = experiment(mi, 200, 1600, vec![CriterionKind::HgbicP], None);
    let logistic = experiment(Scenario::LogisticInteraction, 300, 100, standard, None);

    let results = [
        criterion_1(&p100),
        criterion_2(&p800),
        criterion_3(&p100, &p400, &p1600),
        criterion_4(&logistic),
        criterion_5(&p400),
        criterion_6(p800.n_reps == REPS),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ];
    for r in &results {
        println!("{} criterion {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.id, r.detail);
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
