//! Experiment configuration, runners, and report/plot writers behind the
//! command-line interface.

pub mod config;
pub mod report;
pub mod runners;
pub mod svg;

pub use config::{loss_by_name, ExperimentConfig, ExperimentId, LOSS_NAMES};
pub use report::{CellSummary, EstimateRow, ExperimentReport};
pub use runners::{check_report, run_experiment, run_exp_gamma, run_mult_dirichlet};
pub use svg::{render_svg, render_svg_string, SvgKind};
