//! Experiment runners: simulate data, fit posteriors, minimize posterior
//! risk, and write the report directory.
//!
//! Replications fan out across a worker pool; every replication derives its
//! own RNG streams from the master seed by stable label hashing, so results
//! are byte-identical regardless of thread count or scheduling. Report
//! assembly is single-threaded and ordered by (loss, n, rep), with losses
//! and sample sizes in config order.

use std::fs;
use std::time::Instant;

use rayon::prelude::*;

use crate::asymptotics::{
    gaussian_limit_distance, ks_statistic, qq_points, standardize, FisherInfo,
    ReplicationSet,
};
use crate::bayes_opt::RiskProblem;
use crate::cli::config::{loss_by_name, ExperimentConfig, ExperimentId};
use crate::cli::report::{
    estimates_csv, qq_csv, sanitize_status, CellSummary, EstimateRow, ExperimentReport,
};
use crate::cli::svg::{render_svg, SvgKind};
use crate::error::{Error, Result};
use crate::families::{Exponential, Multinomial, UnivariateFamily};
use crate::posterior::{update_exp_gamma, update_mult_dirichlet_counts};
use crate::special::beta_fn::beta_median;
use crate::special::rng::RngStream;

/// Number of fresh Gaussian reference clouds over which the W₂-to-limit
/// metric is medianed for the two-dimensional study.
pub const METRIC_REPS_2D: usize = 20;

/// Dispatch on the experiment id.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    match config.experiment {
        ExperimentId::ExpGamma => run_exp_gamma(config),
        ExperimentId::MultDirichlet => run_mult_dirichlet(config),
    }
}

fn median(sorted_scratch: &mut Vec<f64>) -> Option<f64> {
    if sorted_scratch.is_empty() {
        return None;
    }
    sorted_scratch.sort_by(f64::total_cmp);
    let m = sorted_scratch.len();
    Some(if m % 2 == 1 {
        sorted_scratch[m / 2]
    } else {
        0.5 * (sorted_scratch[m / 2 - 1] + sorted_scratch[m / 2])
    })
}

fn seed_provenance(config: &ExperimentConfig) -> String {
    format!(
        "master seed {}; each stream is derived by stable label hashing over \
         (experiment, loss, purpose, n, rep) with purposes data, posterior, gauss-ref",
        config.seed
    )
}

const SCALING_CONVENTION: &str = "scaled_k = (I(theta0)^{1/2} * sqrt(n) * \
    (theta_hat - theta0))_k, so the reference law of the scaled columns is \
    N(0, identity); the w2_to_gaussian_limit metric instead compares the raw \
    sqrt(n)*(theta_hat - theta0) cloud with draws from N(0, I(theta0)^{-1})";

/// One replication outcome before standardization.
struct RawRow {
    rep: u64,
    theta_hat: Vec<f64>,
    status: String,
    /// Gap to the exact marginal posterior medians (ℓ¹ losses only).
    median_gap: Option<f64>,
}

/// Fill the `scaled` column for the successful rows of one cell and
/// compute its summary diagnostics.
fn summarize_cell(
    config: &ExperimentConfig,
    loss_name: &str,
    n: u64,
    fisher: &FisherInfo,
    raw: Vec<RawRow>,
    metric_reps: usize,
) -> Result<(Vec<EstimateRow>, CellSummary, Vec<(f64, f64)>)> {
    let dim = config.dim();
    let ok_rows: Vec<&RawRow> = raw.iter().filter(|r| r.status == "ok").collect();

    let mut scaled_ok: Option<Vec<f64>> = None;
    let mut ks = None;
    let mut w2 = None;
    let mut qq = Vec::new();
    if ok_rows.len() >= 2 {
        let estimates: Vec<f64> = ok_rows
            .iter()
            .flat_map(|r| r.theta_hat.iter().copied())
            .collect();
        let reps = ReplicationSet::new(
            n,
            config.theta0.clone(),
            estimates,
            loss_name,
            config.seed,
        )?;
        let standardized = standardize(&reps, fisher)?;
        // Largest marginal KS distance to N(0,1) across coordinates.
        let mut worst = 0.0f64;
        for k in 0..dim {
            let coord: Vec<f64> = standardized.iter().skip(k).step_by(dim).copied().collect();
            worst = worst.max(ks_statistic(&coord)?);
        }
        ks = Some(worst);
        // QQ data for the first coordinate (the only one for scalar models).
        let first: Vec<f64> = standardized.iter().step_by(dim).copied().collect();
        qq = qq_points(&first)?;
        // W₂ to the Gaussian limit, medianed over fresh reference clouds.
        let mut distances = Vec::with_capacity(metric_reps);
        for k in 0..metric_reps {
            let mut rng = RngStream::derived(
                config.seed,
                &[config.experiment.as_str(), loss_name, "gauss-ref"],
                &[n, k as u64],
            )
            .rng();
            distances.push(gaussian_limit_distance(&reps, fisher, &mut rng)?);
        }
        w2 = median(&mut distances);
        scaled_ok = Some(standardized);
    }

    // Scatter the standardized values back into rows; failures stay NaN.
    let mut rows = Vec::with_capacity(raw.len());
    let mut ok_index = 0usize;
    let mut abs_errors = Vec::new();
    let mut worst_gap: Option<f64> = None;
    for r in raw {
        let scaled = if r.status == "ok" {
            let s = scaled_ok
                .as_ref()
                .map(|all| all[ok_index * dim..(ok_index + 1) * dim].to_vec())
                .unwrap_or_else(|| vec![f64::NAN; dim]);
            ok_index += 1;
            let err = r
                .theta_hat
                .iter()
                .zip(&config.theta0)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            abs_errors.push(err);
            if let Some(g) = r.median_gap {
                worst_gap = Some(worst_gap.map_or(g, |w: f64| w.max(g)));
            }
            s
        } else {
            vec![f64::NAN; dim]
        };
        rows.push(EstimateRow {
            rep: r.rep,
            n,
            loss: loss_name.to_string(),
            theta_hat: r.theta_hat,
            scaled,
            status: r.status,
        });
    }

    let succeeded = ok_index;
    let summary = CellSummary {
        loss: loss_name.to_string(),
        n,
        succeeded,
        failed: rows.len() - succeeded,
        ks_standardized: ks,
        w2_to_gaussian_limit: w2,
        median_abs_error: median(&mut abs_errors),
        max_marginal_median_gap: worst_gap,
    };
    Ok((rows, summary, qq))
}

/// Exponential data with a Gamma prior: simulate, update, minimize risk.
///
/// Per replication: one data stream, one posterior-draw stream, both derived
/// from (experiment, loss, purpose, n, rep). Failures are recorded in the
/// status column and the run continues.
pub fn run_exp_gamma(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    if config.experiment != ExperimentId::ExpGamma {
        return Err(Error::config("run_exp_gamma called with a different experiment id"));
    }
    let start = Instant::now();
    let theta0 = config.theta0[0];
    let (a, b) = (config.prior[0], config.prior[1]);
    let fisher = FisherInfo::Scalar(1.0 / (theta0 * theta0));

    let mut all_rows = Vec::new();
    let mut cells = Vec::new();
    let mut qq_artifacts: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for loss_name in &config.losses {
        for &n in &config.n_grid {
            let raw: Vec<RawRow> = (0..config.replications as u64)
                .into_par_iter()
                .map(|rep| {
                    let outcome = (|| -> Result<(Vec<f64>, bool)> {
                        let mut data_rng = RngStream::derived(
                            config.seed,
                            &[config.experiment.as_str(), loss_name, "data"],
                            &[n, rep],
                        )
                        .rng();
                        let data = Exponential.sample(theta0, n as usize, &mut data_rng)?;
                        let post = update_exp_gamma(a, b, &data)?;
                        let mut draw_rng = RngStream::derived(
                            config.seed,
                            &[config.experiment.as_str(), loss_name, "posterior"],
                            &[n, rep],
                        )
                        .rng();
                        let draws = post.sample(config.posterior_draws, &mut draw_rng)?;
                        let problem =
                            RiskProblem::new(loss_by_name(loss_name, 1)?, draws)?;
                        let result = problem.minimize_risk()?;
                        Ok((result.point, result.converged))
                    })();
                    match outcome {
                        Ok((point, true)) => RawRow {
                            rep,
                            theta_hat: point,
                            status: "ok".to_string(),
                            median_gap: None,
                        },
                        Ok((point, false)) => RawRow {
                            rep,
                            theta_hat: point,
                            status: "iteration-cap".to_string(),
                            median_gap: None,
                        },
                        Err(e) => RawRow {
                            rep,
                            theta_hat: vec![f64::NAN],
                            status: sanitize_status(&e.to_string()),
                            median_gap: None,
                        },
                    }
                })
                .collect();
            let (rows, summary, qq) =
                summarize_cell(config, loss_name, n, &fisher, raw, 1)?;
            all_rows.extend(rows);
            cells.push(summary);
            if !qq.is_empty() {
                qq_artifacts.push((format!("qq-{loss_name}-n{n}"), qq));
            }
        }
    }

    let report = ExperimentReport {
        experiment: config.experiment.as_str().to_string(),
        config: config.clone(),
        seed_provenance: seed_provenance(config),
        scaling_convention: SCALING_CONVENTION.to_string(),
        cells,
        rows: all_rows,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    write_common_artifacts(config, &report)?;
    for (stem, qq) in &qq_artifacts {
        fs::write(config.output_dir.join(format!("{stem}.csv")), qq_csv(qq))?;
        render_svg(qq, SvgKind::Qq, &config.output_dir.join(format!("{stem}.svg")))?;
    }
    Ok(report)
}

/// Three-category multinomial data with a Dirichlet prior.
///
/// Per replication the ℓ¹-risk estimate is cross-checked against the exact
/// Bayes answer — the vector of marginal posterior Beta medians — and the
/// worst gap per cell lands in the report. The W₂-to-limit metric is the
/// median over [`METRIC_REPS_2D`] reference clouds.
pub fn run_mult_dirichlet(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    if config.experiment != ExperimentId::MultDirichlet {
        return Err(Error::config(
            "run_mult_dirichlet called with a different experiment id",
        ));
    }
    let start = Instant::now();
    let model = Multinomial::new(config.prior.len())?;
    let fisher = FisherInfo::Two(model.fisher_info_2d(&config.theta0)?);
    let alpha_total: f64 = config.prior.iter().sum();

    let mut all_rows = Vec::new();
    let mut cells = Vec::new();
    let mut trend: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for loss_name in &config.losses {
        let mut trend_points = Vec::new();
        for &n in &config.n_grid {
            let raw: Vec<RawRow> = (0..config.replications as u64)
                .into_par_iter()
                .map(|rep| {
                    let outcome = (|| -> Result<(Vec<f64>, bool, Option<f64>)> {
                        let mut data_rng = RngStream::derived(
                            config.seed,
                            &[config.experiment.as_str(), loss_name, "data"],
                            &[n, rep],
                        )
                        .rng();
                        let counts = model.sample_counts(&config.theta0, n, &mut data_rng)?;
                        let post = update_mult_dirichlet_counts(&config.prior, &counts)?;
                        let mut draw_rng = RngStream::derived(
                            config.seed,
                            &[config.experiment.as_str(), loss_name, "posterior"],
                            &[n, rep],
                        )
                        .rng();
                        let draws = post.sample(config.posterior_draws, &mut draw_rng)?;
                        let problem =
                            RiskProblem::new(loss_by_name(loss_name, 2)?, draws)?;
                        let result = problem.minimize_risk()?;
                        // The ℓ¹ Bayes estimate is exactly the vector of
                        // marginal medians; measure how far the Monte Carlo
                        // minimizer landed from it.
                        let gap = if loss_name == "l1-reparam" {
                            let mut worst = 0.0f64;
                            for (k, t) in result.point.iter().enumerate() {
                                let shape_a = config.prior[k] + counts[k] as f64;
                                let shape_b = alpha_total + n as f64 - shape_a;
                                worst = worst.max((t - beta_median(shape_a, shape_b)?).abs());
                            }
                            Some(worst)
                        } else {
                            None
                        };
                        Ok((result.point, result.converged, gap))
                    })();
                    match outcome {
                        Ok((point, true, gap)) => RawRow {
                            rep,
                            theta_hat: point,
                            status: "ok".to_string(),
                            median_gap: gap,
                        },
                        Ok((point, false, _)) => RawRow {
                            rep,
                            theta_hat: point,
                            status: "iteration-cap".to_string(),
                            median_gap: None,
                        },
                        Err(e) => RawRow {
                            rep,
                            theta_hat: vec![f64::NAN; 2],
                            status: sanitize_status(&e.to_string()),
                            median_gap: None,
                        },
                    }
                })
                .collect();
            let (rows, summary, _qq) =
                summarize_cell(config, loss_name, n, &fisher, raw, METRIC_REPS_2D)?;
            if let Some(w2) = summary.w2_to_gaussian_limit {
                trend_points.push((n as f64, w2));
            }
            all_rows.extend(rows);
            cells.push(summary);
        }
        if !trend_points.is_empty() {
            trend.push((format!("trend-w2-{loss_name}"), trend_points));
        }
    }

    let report = ExperimentReport {
        experiment: config.experiment.as_str().to_string(),
        config: config.clone(),
        seed_provenance: seed_provenance(config),
        scaling_convention: SCALING_CONVENTION.to_string(),
        cells,
        rows: all_rows,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    write_common_artifacts(config, &report)?;
    for (stem, points) in &trend {
        let mut csv = String::from("n,w2_to_gaussian_limit\n");
        for (n, w2) in points {
            csv.push_str(&format!("{n},{w2}\n"));
        }
        fs::write(config.output_dir.join(format!("{stem}.csv")), csv)?;
        render_svg(
            points,
            SvgKind::Trend,
            &config.output_dir.join(format!("{stem}.svg")),
        )?;
    }
    Ok(report)
}

fn write_common_artifacts(config: &ExperimentConfig, report: &ExperimentReport) -> Result<()> {
    fs::create_dir_all(&config.output_dir)?;
    fs::write(
        config.output_dir.join("estimates.csv"),
        estimates_csv(&report.rows, config.dim())?,
    )?;
    fs::write(config.output_dir.join("report.json"), report.to_json()?)?;
    Ok(())
}

/// Evaluate the run against its experiment's acceptance-style checks and
/// return a list of human-readable failures (empty = all checks passed).
pub fn check_report(report: &ExperimentReport) -> Vec<String> {
    let mut failures = Vec::new();
    let config = &report.config;
    for cell in &report.cells {
        if cell.succeeded < 2 {
            failures.push(format!(
                "cell ({}, n={}): only {} successful replications",
                cell.loss, cell.n, cell.succeeded
            ));
        }
    }
    let (&n_lo, &n_hi) = match (config.n_grid.iter().min(), config.n_grid.iter().max()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => return failures,
    };
    for loss in &config.losses {
        match config.experiment {
            ExperimentId::ExpGamma => {
                if let Some(cell) = report.cell(loss, n_hi) {
                    match cell.ks_standardized {
                        Some(ks) if ks <= 0.09 => {}
                        Some(ks) => failures.push(format!(
                            "{loss}: KS {ks:.4} at n={n_hi} exceeds 0.09"
                        )),
                        None => failures.push(format!("{loss}: no KS value at n={n_hi}")),
                    }
                }
                if n_lo < n_hi {
                    let lo = report.cell(loss, n_lo).and_then(|c| c.median_abs_error);
                    let hi = report.cell(loss, n_hi).and_then(|c| c.median_abs_error);
                    match (lo, hi) {
                        (Some(lo), Some(hi)) if hi < lo => {}
                        (Some(lo), Some(hi)) => failures.push(format!(
                            "{loss}: median |error| did not shrink ({lo:.5} at n={n_lo} \
                             vs {hi:.5} at n={n_hi})"
                        )),
                        _ => failures.push(format!("{loss}: missing median |error| values")),
                    }
                }
            }
            ExperimentId::MultDirichlet => {
                if loss == "l1-reparam" {
                    for cell in report.cells.iter().filter(|c| &c.loss == loss) {
                        match cell.max_marginal_median_gap {
                            Some(g) if g <= 1e-3 => {}
                            Some(g) => failures.push(format!(
                                "{loss}: estimate is {g:.2e} from the marginal medians \
                                 at n={} (tolerance 1e-3)",
                                cell.n
                            )),
                            None => failures.push(format!(
                                "{loss}: no marginal-median gap recorded at n={}",
                                cell.n
                            )),
                        }
                    }
                }
                let w2: Vec<(u64, f64)> = config
                    .n_grid
                    .iter()
                    .filter_map(|&n| {
                        report.cell(loss, n).and_then(|c| c.w2_to_gaussian_limit.map(|w| (n, w)))
                    })
                    .collect();
                if w2.len() == config.n_grid.len() {
                    if !w2.windows(2).all(|w| w[1].1 < w[0].1) {
                        failures.push(format!(
                            "{loss}: W2-to-limit medians not strictly decreasing: {w2:?}"
                        ));
                    }
                } else {
                    failures.push(format!("{loss}: missing W2-to-limit values"));
                }
            }
        }
    }
    failures
}

/// Sanity check used by tests: artifact names a run is expected to produce.
pub fn expected_artifacts(config: &ExperimentConfig) -> Vec<String> {
    let mut names = vec!["estimates.csv".to_string(), "report.json".to_string()];
    match config.experiment {
        ExperimentId::ExpGamma => {
            for loss in &config.losses {
                for n in &config.n_grid {
                    names.push(format!("qq-{loss}-n{n}.csv"));
                    names.push(format!("qq-{loss}-n{n}.svg"));
                }
            }
        }
        ExperimentId::MultDirichlet => {
            for loss in &config.losses {
                names.push(format!("trend-w2-{loss}.csv"));
                names.push(format!("trend-w2-{loss}.svg"));
            }
        }
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn temp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("bvmlab-runner-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        dir
    }

    fn small_exp_gamma(tag: &str) -> ExperimentConfig {
        let mut config = ExperimentConfig::exp_gamma_defaults(temp_dir(tag));
        config.n_grid = vec![10, 100];
        config.replications = 12;
        config.posterior_draws = 400;
        config.losses = vec!["kl-exp".to_string(), "norm-power".to_string()];
        config
    }

    #[test]
    fn exp_gamma_run_is_deterministic_and_complete() {
        let config_a = small_exp_gamma("a");
        let report_a = run_exp_gamma(&config_a).unwrap();
        let snapshot: Vec<(String, Vec<u8>)> = expected_artifacts(&config_a)
            .into_iter()
            .map(|name| {
                let bytes = fs::read(config_a.output_dir.join(&name)).unwrap();
                (name, bytes)
            })
            .collect();
        fs::remove_dir_all(&config_a.output_dir).unwrap();

        let _report_b = run_exp_gamma(&config_a).unwrap();
        for (name, bytes) in &snapshot {
            let again = fs::read(config_a.output_dir.join(name)).unwrap();
            assert_eq!(&again, bytes, "artifact {name} differs between identical runs");
            assert!(!bytes.is_empty());
        }

        assert_eq!(report_a.rows.len(), 2 * 2 * 12);
        assert_eq!(report_a.cells.len(), 4);
        // Rows ordered by (loss, n, rep) in config order.
        let mut expected_order = Vec::new();
        for loss in &config_a.losses {
            for &n in &config_a.n_grid {
                for rep in 0..12u64 {
                    expected_order.push((loss.clone(), n, rep));
                }
            }
        }
        let actual: Vec<(String, u64, u64)> = report_a
            .rows
            .iter()
            .map(|r| (r.loss.clone(), r.n, r.rep))
            .collect();
        assert_eq!(actual, expected_order);

        let _ = fs::remove_dir_all(&config_a.output_dir);
    }

    #[test]
    fn exp_gamma_squared_loss_recovers_posterior_mean() {
        // Control loss: under squared error the Bayes estimate is the
        // posterior mean (a+n)/(b+Σx); the optimizer must land on the
        // draw mean, which converges to it. With S=5000 draws the Monte
        // Carlo gap is ~ sd/√S ≈ 1%; assert generous but nontrivial.
        let mut config = ExperimentConfig::exp_gamma_defaults(temp_dir("sq"));
        config.n_grid = vec![50];
        config.replications = 6;
        config.posterior_draws = 5000;
        config.losses = vec!["norm-power".to_string()];
        let report = run_exp_gamma(&config).unwrap();
        for row in &report.rows {
            assert!(row.is_ok(), "replication failed: {}", row.status);
            // Rebuild the replication's data stream to recover Σx.
            let mut data_rng = RngStream::derived(
                config.seed,
                &["exp-gamma", "norm-power", "data"],
                &[50, row.rep],
            )
            .rng();
            let data = Exponential.sample(2.0, 50, &mut data_rng).unwrap();
            let posterior_mean =
                (config.prior[0] + 50.0) / (config.prior[1] + data.iter().sum::<f64>());
            assert!(
                (row.theta_hat[0] - posterior_mean).abs() < 0.05 * posterior_mean,
                "rep {}: {} vs posterior mean {posterior_mean}",
                row.rep,
                row.theta_hat[0]
            );
        }
        let _ = fs::remove_dir_all(&config.output_dir);
    }

    #[test]
    fn mult_dirichlet_small_run_tracks_beta_medians() {
        let mut config = ExperimentConfig::mult_dirichlet_defaults(temp_dir("md"));
        config.n_grid = vec![16];
        config.replications = 3;
        config.posterior_draws = 30_000;
        let report = run_mult_dirichlet(&config).unwrap();
        assert_eq!(report.rows.len(), 3);
        for row in &report.rows {
            assert!(row.is_ok(), "status {}", row.status);
        }
        let cell = report.cell("l1-reparam", 16).unwrap();
        // At S=30k the sample median is within ~1.5e-3 of the Beta median
        // with high probability; the full-scale run tightens this to 1e-3.
        let gap = cell.max_marginal_median_gap.unwrap();
        assert!(gap < 5e-3, "gap {gap}");
        assert!(cell.w2_to_gaussian_limit.is_some());
        for name in expected_artifacts(&config) {
            assert!(config.output_dir.join(&name).exists(), "{name} missing");
        }
        let _ = fs::remove_dir_all(&config.output_dir);
    }

    #[test]
    fn check_report_flags_regressions() {
        let config = small_exp_gamma("check");
        let mut report = run_exp_gamma(&config).unwrap();
        // Small n and few replications: KS can be large, but the shape of
        // the check matters here, not the verdict. Force a clean pass, then
        // break it.
        for cell in report.cells.iter_mut() {
            cell.ks_standardized = Some(0.05);
        }
        for (i, cell) in report.cells.iter_mut().enumerate() {
            cell.median_abs_error = Some(if i % 2 == 0 { 0.3 } else { 0.1 });
        }
        assert!(check_report(&report).is_empty());

        report.cells[1].ks_standardized = Some(0.2);
        let failures = check_report(&report);
        assert!(failures.iter().any(|f| f.contains("exceeds 0.09")), "{failures:?}");
        let _ = fs::remove_dir_all(&config.output_dir);
    }
}
