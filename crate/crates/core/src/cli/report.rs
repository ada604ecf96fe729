//! Experiment reports: the per-replication estimate table with its fixed
//! CSV schema, per-cell summaries, and the JSON report document.
//!
//! Reruns of the same config byte-reproduce every artifact; the wall-clock
//! field is kept on the in-memory report for callers but excluded from the
//! serialized JSON so the output directory stays reproducible.

use std::fmt::Write as _;

use serde::Serialize;

use crate::cli::config::ExperimentConfig;
use crate::error::{Error, Result};

/// One replication's estimate. `scaled` holds the standardized error
/// I(ϑ₀)^{1/2}·√n·(θ̂−ϑ₀); on failure both vectors are NaN and `status`
/// carries the error text.
#[derive(Clone, Debug, Serialize)]
pub struct EstimateRow {
    pub rep: u64,
    pub n: u64,
    pub loss: String,
    pub theta_hat: Vec<f64>,
    pub scaled: Vec<f64>,
    pub status: String,
}

impl EstimateRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Summary of one (loss, n) cell of the experiment grid.
#[derive(Clone, Debug, Serialize)]
pub struct CellSummary {
    pub loss: String,
    pub n: u64,
    pub succeeded: usize,
    pub failed: usize,
    /// KS distance of the standardized errors to N(0, 1) marginals
    /// (worst coordinate for vector parameters).
    pub ks_standardized: Option<f64>,
    /// Empirical W₂ between √n(θ̂−ϑ₀) and draws from the Gaussian limit;
    /// the median over the metric repetitions when there are several.
    pub w2_to_gaussian_limit: Option<f64>,
    /// Median over replications of ‖θ̂−ϑ₀‖∞ (consistency diagnostic).
    pub median_abs_error: Option<f64>,
    /// Largest gap between θ̂ and the exact marginal posterior medians
    /// (ℓ¹ losses only, where the medians are the exact Bayes estimate).
    pub max_marginal_median_gap: Option<f64>,
}

/// Everything a run produces, minus the artifacts already on disk.
#[derive(Debug, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub seed_provenance: String,
    pub scaling_convention: String,
    pub cells: Vec<CellSummary>,
    pub rows: Vec<EstimateRow>,
    /// Not serialized: timing varies run to run, and the report document
    /// participates in the byte-reproducibility contract.
    #[serde(skip_serializing)]
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn cell(&self, loss: &str, n: u64) -> Option<&CellSummary> {
        self.cells.iter().find(|c| c.loss == loss && c.n == n)
    }
}

/// Format a float for CSV: shortest representation that round-trips,
/// `NaN` for failures. Deterministic for identical inputs.
fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x}")
    }
}

/// Render the estimate table with the fixed schema
/// `rep,n,loss,theta_hat_1..d,scaled_1..d,status`.
///
/// Rows must already be ordered; callers sort by (loss, n, rep).
pub fn estimates_csv(rows: &[EstimateRow], dim: usize) -> Result<String> {
    if dim == 0 {
        return Err(Error::dimension("estimates_csv", "dimension zero"));
    }
    let mut out = String::new();
    out.push_str("rep,n,loss");
    for k in 1..=dim {
        let _ = write!(out, ",theta_hat_{k}");
    }
    for k in 1..=dim {
        let _ = write!(out, ",scaled_{k}");
    }
    out.push_str(",status\n");
    for row in rows {
        if row.theta_hat.len() != dim || row.scaled.len() != dim {
            return Err(Error::dimension(
                "estimates_csv",
                format!("row {} has wrong width", row.rep),
            ));
        }
        if row.status.contains([',', '\n', '"']) {
            return Err(Error::config(format!(
                "status {:?} would break the CSV schema",
                row.status
            )));
        }
        let _ = write!(out, "{},{},{}", row.rep, row.n, row.loss);
        for x in &row.theta_hat {
            let _ = write!(out, ",{}", fmt_f64(*x));
        }
        for x in &row.scaled {
            let _ = write!(out, ",{}", fmt_f64(*x));
        }
        let _ = writeln!(out, ",{}", row.status);
    }
    Ok(out)
}

/// Render QQ pairs as a two-column CSV.
pub fn qq_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("theoretical,empirical\n");
    for (theo, emp) in points {
        let _ = writeln!(out, "{},{}", fmt_f64(*theo), fmt_f64(*emp));
    }
    out
}

/// Strip characters that would collide with the CSV schema from an error
/// message destined for the status column.
pub fn sanitize_status(msg: &str) -> String {
    msg.chars()
        .map(|c| match c {
            ',' => ';',
            '\n' => ' ',
            '"' => '\'',
            c => c,
        })
        .collect()
}
