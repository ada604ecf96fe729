//! Command-line front end: loss grids, derivative checks, the frequency
//! barycenter LP report, the simulation experiments, and QQ rendering.
//!
//! Exit codes: 0 on success, 1 on operational errors (bad arguments, I/O,
//! numerical failures), 2 when a `--check` run finds failed checks.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use bvmlab::cli::{
    check_report, loss_by_name, render_svg, run_experiment, ExperimentConfig, ExperimentId,
    SvgKind,
};
use bvmlab::discrete_ot::{
    build_barycenter_dual, build_barycenter_lp, build_barycenter_risk_lp, simplex_solve,
    LpOutcome, LpSolution, StandardLP,
};
use bvmlab::losses::{w2sq_pareto_grad, Loss};
use bvmlab::wass_calculus::{pareto_dual_model, w2_gradient_dual, w2_hessian_dual};
use bvmlab::{Error, Result};

#[derive(Parser)]
#[command(
    name = "bvmlab",
    version,
    about = "Numerical laboratory for Bayes estimators under transport, divergence, and discrepancy losses"
)]
struct CliArgs {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump a (t, theta, value, gradient) grid for a scalar loss as CSV.
    LossTable(LossTableArgs),
    /// Compare dual-potential transport derivatives against the closed form
    /// on a 5x5 grid; prints a pass/fail CSV row per grid point.
    CheckDerivatives(CheckDerivativesArgs),
    /// Build and solve the frequency-barycenter LP, its dual, the
    /// risk-calibrated variant, and the brute-force direct minimizer;
    /// prints everything as one JSON document.
    BarycenterLp(BarycenterArgs),
    /// Run a simulation experiment and write its report directory.
    BvmSim(BvmSimArgs),
    /// Render a two-column (theoretical, empirical) CSV as a QQ-plot SVG.
    Qq(QqArgs),
}

#[derive(Args)]
struct LossTableArgs {
    /// Loss name, e.g. kl-exp, w2sq-pareto, tv-gauss.
    #[arg(long)]
    loss: String,
    /// Grid points per axis (total rows = points^2).
    #[arg(long, default_value_t = 9)]
    points: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckDerivativesArgs {
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with code 2 if any grid point fails its tolerance.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct BarycenterArgs {
    /// Comma-separated observed category frequencies, e.g. 0.6,0.3,0.1.
    #[arg(long, value_delimiter = ',', required = true)]
    freq: Vec<f64>,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BvmSimArgs {
    /// Experiment id: exp-gamma or mult-dirichlet. Optional when --config
    /// names a file (the file carries the id).
    #[arg(long)]
    experiment: Option<String>,
    /// JSON config file; fields follow the defaults written by a plain run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config file's choice).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Append n = 10^6 to the sample-size grid (full-scale tail).
    #[arg(long)]
    include_large_n: bool,
    /// Use 2000 replications instead of the desk-scale default.
    #[arg(long)]
    full_replications: bool,
    /// After the run, verify the report's summary checks; exit 2 on failure.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct QqArgs {
    /// CSV with header `theoretical,empirical` (as written by bvm-sim).
    #[arg(long)]
    input: PathBuf,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = CliArgs::parse();
    let outcome = match cli.command {
        Command::LossTable(args) => loss_table(&args),
        Command::CheckDerivatives(args) => check_derivatives(&args),
        Command::BarycenterLp(args) => barycenter_lp(&args),
        Command::BvmSim(args) => bvm_sim(&args),
        Command::Qq(args) => qq(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

/// Write to `out` when given, otherwise to stdout.
fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![0.5 * (lo + hi)];
    }
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| lo + step * i as f64).collect()
}

/// Sensible display window per scalar loss; a subset of each loss's
/// operational domain, wide enough to show curvature and asymmetry.
fn loss_table_range(name: &str) -> Result<(f64, f64)> {
    match name {
        "hellinger-exp" | "w2sq-exp" | "kl-exp" | "stein-variance" | "w1-gompertz" => {
            Ok((0.5, 4.0))
        }
        "w2sq-pareto" => Ok((2.5, 6.0)),
        "tv-gauss" | "norm-power" => Ok((-2.0, 2.0)),
        other => Err(Error::config(format!(
            "loss-table covers scalar-parameter losses only; `{other}` is not one of them"
        ))),
    }
}

fn loss_table(args: &LossTableArgs) -> Result<ExitCode> {
    if args.points == 0 {
        return Err(Error::config("--points must be at least 1"));
    }
    let (lo, hi) = loss_table_range(&args.loss)?;
    let loss: Box<dyn Loss> = loss_by_name(&args.loss, 1)?;
    let grid = linspace(lo, hi, args.points);
    let mut csv = String::from("t,theta,value,gradient\n");
    for &t in &grid {
        for &theta in &grid {
            let value = loss.eval(&[t], &[theta])?;
            let grad = match loss.grad_t(&[t], &[theta])? {
                Some(g) => format!("{}", g[0]),
                None => String::new(),
            };
            csv.push_str(&format!("{t},{theta},{value},{grad}\n"));
        }
    }
    emit(&csv, args.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

const DERIV_GRID: (f64, f64, usize) = (2.5, 6.0, 5);
const GRAD_REL_TOL: f64 = 1e-5;
const HESS_REL_TOL: f64 = 1e-4;
/// Central-difference step for the Hessian oracle (differencing the
/// closed-form gradient), balancing truncation against round-off.
const HESS_FD_STEP: f64 = 1e-4;

fn check_derivatives(args: &CheckDerivativesArgs) -> Result<ExitCode> {
    let model = pareto_dual_model();
    let (lo, hi, points) = DERIV_GRID;
    let grid = linspace(lo, hi, points);
    let mut csv = String::from(
        "t0,theta,grad_dual,grad_closed,grad_rel_err,grad_ok,hess_dual,hess_fd,hess_rel_err,hess_ok\n",
    );
    let mut failures = 0usize;
    for &t0 in &grid {
        for &theta in &grid {
            let grad_dual = w2_gradient_dual(&model, t0, theta)?;
            let grad_closed = w2sq_pareto_grad(t0, theta)?;
            let grad_rel = rel_err(grad_dual, grad_closed);
            let grad_ok = grad_rel <= GRAD_REL_TOL;

            let hess_dual = w2_hessian_dual(&model, t0, theta)?;
            let h = HESS_FD_STEP;
            let hess_fd = (w2sq_pareto_grad(t0 + h, theta)? - w2sq_pareto_grad(t0 - h, theta)?)
                / (2.0 * h);
            let hess_rel = rel_err(hess_dual, hess_fd);
            let hess_ok = hess_rel <= HESS_REL_TOL;

            if !grad_ok || !hess_ok {
                failures += 1;
            }
            csv.push_str(&format!(
                "{t0},{theta},{grad_dual},{grad_closed},{grad_rel},{grad_ok},{hess_dual},{hess_fd},{hess_rel},{hess_ok}\n"
            ));
        }
    }
    emit(&csv, args.out.as_ref())?;
    if failures > 0 {
        eprintln!("{failures} of {} grid points failed", points * points);
        if args.check {
            return Ok(ExitCode::from(2));
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Relative error with the same unit floor the derivative tests use, so a
/// near-zero reference (the gradient vanishes on the diagonal) does not
/// inflate the ratio.
fn rel_err(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(1.0)
}

fn solution_json(outcome: &LpOutcome) -> serde_json::Value {
    match outcome {
        LpOutcome::Optimal(sol) => json!({ "x": sol.x, "objective": sol.objective }),
        LpOutcome::Infeasible => json!("infeasible"),
        LpOutcome::Unbounded => json!("unbounded"),
    }
}

fn optimal(outcome: LpOutcome, which: &str) -> Result<LpSolution> {
    match outcome {
        LpOutcome::Optimal(sol) => Ok(sol),
        other => Err(Error::lp("barycenter-lp", format!("{which}: {other:?}"))),
    }
}

fn lp_json(lp: &StandardLP) -> serde_json::Value {
    json!({ "c": lp.c, "a": lp.a, "b": lp.b })
}

/// Extend the LP head variables (t_1..t_{d-1}, slacks, u = t_d) to the full
/// probability vector the program encodes.
fn probs_from_lp_solution(sol: &LpSolution, d: usize) -> Vec<f64> {
    let mut probs: Vec<f64> = sol.x[..d - 1].to_vec();
    probs.push(sol.x[2 * (d - 1)]);
    probs
}

/// Average transport risk of the estimate `probs` against the observed
/// point masses, using the exact discrete W2² = 1 - sum_k min(t_k, e_jk),
/// which reduces to 1 - sum_j N_j t_j.
fn direct_risk(freq: &[f64], probs: &[f64]) -> f64 {
    1.0 - freq.iter().zip(probs).map(|(n, t)| n * t).sum::<f64>()
}

const LP_DISCREPANCY_TOL: f64 = 1e-9;

fn barycenter_lp(args: &BarycenterArgs) -> Result<ExitCode> {
    let freq = &args.freq;
    let d = freq.len();
    let lp = build_barycenter_lp(freq)?;
    let dual = build_barycenter_dual(freq)?;
    let risk_lp = build_barycenter_risk_lp(freq)?;

    let primal_outcome = simplex_solve(&lp)?;
    let dual_outcome = simplex_solve(&dual)?;
    let risk_outcome = simplex_solve(&risk_lp)?;

    let primal = optimal(primal_outcome.clone(), "barycenter LP")?;
    let dual_sol = optimal(dual_outcome.clone(), "barycenter dual")?;
    let risk_sol = optimal(risk_outcome.clone(), "risk-calibrated LP")?;

    // The dual is posed in standard form as a minimization of the negated
    // dual objective, so strong duality reads primal = -dual.
    let duality_gap = (primal.objective + dual_sol.objective).abs();

    let head_freq_sum: f64 = freq[..d - 1].iter().sum();
    let risk_value = risk_sol.objective + head_freq_sum;

    // Brute force over simplex vertices: the direct risk is linear in t, so
    // its minimum over the simplex is attained at a vertex e_j with risk
    // 1 - N_j; the argmin is the modal category.
    let (mode, &mode_freq) = freq
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite frequencies"))
        .expect("nonempty frequency vector");
    let direct_min = 1.0 - mode_freq;
    let mut mode_probs = vec![0.0; d];
    mode_probs[mode] = 1.0;

    let lp_probs = probs_from_lp_solution(&primal, d);
    let risk_probs = probs_from_lp_solution(&risk_sol, d);
    let lp_direct_risk = direct_risk(freq, &lp_probs);
    let risk_gap = lp_direct_risk - direct_min;

    let doc = json!({
        "freq": freq,
        "lp": lp_json(&lp),
        "lp_optimum": solution_json(&primal_outcome),
        "lp_minimizer_probs": lp_probs,
        "dual": lp_json(&dual),
        "dual_optimum": solution_json(&dual_outcome),
        "strong_duality_gap": duality_gap,
        "risk_lp": lp_json(&risk_lp),
        "risk_lp_optimum": solution_json(&risk_outcome),
        "risk_lp_minimizer_probs": risk_probs,
        "risk_value": risk_value,
        "direct_minimizer": {
            "vertex": mode,
            "probs": mode_probs,
            "risk": direct_min,
        },
        "lp_minimizer_direct_risk": lp_direct_risk,
        "lp_vs_direct_risk_gap": risk_gap,
        "discrepancy_flagged": risk_gap.abs() > LP_DISCREPANCY_TOL,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    emit(&text, args.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn bvm_sim(args: &BvmSimArgs) -> Result<ExitCode> {
    let mut config = match (&args.config, &args.experiment) {
        (Some(path), maybe_id) => {
            let config = ExperimentConfig::from_json_file(path)?;
            if let Some(id) = maybe_id {
                let requested = ExperimentId::parse(id)?;
                if requested != config.experiment {
                    return Err(Error::config(format!(
                        "--experiment {} conflicts with config file experiment {}",
                        requested.as_str(),
                        config.experiment.as_str()
                    )));
                }
            }
            config
        }
        (None, Some(id)) => {
            let id = ExperimentId::parse(id)?;
            let out = args
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("bvmlab-out").join(id.as_str()));
            match id {
                ExperimentId::ExpGamma => ExperimentConfig::exp_gamma_defaults(out),
                ExperimentId::MultDirichlet => ExperimentConfig::mult_dirichlet_defaults(out),
            }
        }
        (None, None) => {
            return Err(Error::config("pass --experiment <id> or --config <file>"));
        }
    };
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    if args.include_large_n && !config.n_grid.contains(&1_000_000) {
        config.n_grid.push(1_000_000);
    }
    if args.full_replications {
        config.replications = 2000;
    }
    if let Ok(seed_text) = std::env::var("BVMLAB_SEED") {
        let seed: u64 = seed_text
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("BVMLAB_SEED is not a u64: `{seed_text}`")))?;
        config.seed = seed;
    }
    config.validate()?;

    let report = run_experiment(&config)?;
    println!(
        "experiment {} seed {} -> {}",
        report.experiment,
        config.seed,
        config.output_dir.display()
    );
    println!("{}", report.scaling_convention);
    println!(
        "{:<18} {:>8} {:>5}/{:<5} {:>10} {:>10} {:>12} {:>12}",
        "loss", "n", "ok", "fail", "ks", "w2_limit", "med|err|", "median_gap"
    );
    for cell in &report.cells {
        println!(
            "{:<18} {:>8} {:>5}/{:<5} {:>10} {:>10} {:>12} {:>12}",
            cell.loss,
            cell.n,
            cell.succeeded,
            cell.failed,
            fmt_opt(cell.ks_standardized),
            fmt_opt(cell.w2_to_gaussian_limit),
            fmt_opt(cell.median_abs_error),
            fmt_opt(cell.max_marginal_median_gap),
        );
    }
    println!("wall clock: {:.1}s", report.wall_clock_seconds);

    if args.check {
        let failures = check_report(&report);
        if !failures.is_empty() {
            for failure in &failures {
                eprintln!("check failed: {failure}");
            }
            return Ok(ExitCode::from(2));
        }
        println!("all checks passed");
    }
    Ok(ExitCode::SUCCESS)
}

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.4}"),
        None => "-".to_string(),
    }
}

fn qq(args: &QqArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.input)?;
    let mut points = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (a, b) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a.trim(), b.trim()),
            _ => {
                return Err(Error::config(format!(
                    "line {}: expected exactly two comma-separated columns",
                    idx + 1
                )))
            }
        };
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(y)) => points.push((x, y)),
            _ if idx == 0 => continue, // header row
            _ => {
                return Err(Error::config(format!(
                    "line {}: could not parse `{a},{b}` as numbers",
                    idx + 1
                )))
            }
        }
    }
    render_svg(&points, SvgKind::Qq, &args.out)?;
    eprintln!("wrote {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}
