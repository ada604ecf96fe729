//! A numerical laboratory for Bayes estimators under transport and
//! divergence losses.
//!
//! The crate computes Bayes estimators by minimizing exact Monte Carlo
//! posterior risk for a family of closed-form losses — squared
//! 2-Wasserstein distances on exponential, Pareto, Gaussian, and multinomial
//! models, Hellinger, Kullback–Leibler, Stein, total-variation, and Sinkhorn
//! divergences — and then measures how those estimators concentrate and
//! normalize as the sample size grows.
//!
//! # Modules
//!
//! * [`losses`] — the loss functions ℓ(t, ϑ) in closed form, each with
//!   domain metadata and, where available, analytic gradients and exact
//!   local expansions.
//! * [`posterior`] — exact conjugate posteriors (Gamma for an exponential
//!   rate, Dirichlet for multinomial probabilities) with reproducible
//!   samplers.
//! * [`bayes_opt`] — [`bayes_opt::RiskProblem`]: frozen posterior draws plus
//!   a loss, minimized by golden-section or projected Nelder–Mead.
//! * [`asymptotics`] — replication bookkeeping, standardized errors,
//!   Kolmogorov–Smirnov and QQ statistics against the Gaussian limit.
//! * [`discrete_ot`] — exact discrete optimal transport and barycenter
//!   linear programs solved by a two-phase simplex method.
//! * [`wass_calculus`] — first- and second-order calculus of the squared
//!   2-Wasserstein distance through its dual potential.
//! * [`families`] — the sampling models (exponential, Pareto, Gompertz)
//!   behind the losses.
//! * [`special`] — quadrature, special functions, 2×2 symmetric matrix
//!   algebra, and counter-based RNG streams that the rest of the crate
//!   builds on.
//! * [`cli`] — experiment configuration, runners, reports, and SVG
//!   rendering used by the `bvmlab` binary.
//!
//! # Example
//!
//! A Bayes estimator for an exponential rate under squared 2-Wasserstein
//! loss, starting from the exact conjugate posterior:
//!
//! ```
//! use bvmlab::bayes_opt::RiskProblem;
//! use bvmlab::cli::loss_by_name;
//! use bvmlab::posterior::update_exp_gamma;
//! use bvmlab::special::rng::RngStream;
//!
//! fn main() -> bvmlab::Result<()> {
//!     // Gamma(2, 2) prior and five observations: the posterior is
//!     // Gamma(2 + 5, 2 + Σx) exactly.
//!     let posterior = update_exp_gamma(2.0, 2.0, &[0.3, 0.8, 0.2, 0.5, 0.7])?;
//!     let mut rng = RngStream::new(7, 0).rng();
//!     let draws = posterior.sample(4_000, &mut rng)?;
//!
//!     let problem = RiskProblem::new(loss_by_name("w2sq-exp", 1)?, draws)?;
//!     let bayes = problem.minimize_risk()?;
//!     assert!(bayes.converged);
//!
//!     // This loss weights errors by 1/θ², so its Bayes estimator sits
//!     // strictly below the posterior mean.
//!     assert!(bayes.point[0] < posterior.mean()[0]);
//!     Ok(())
//! }
//! ```
mod error;
pub mod asymptotics;
pub mod bayes_opt;
pub mod cli;
pub mod discrete_ot;
pub mod families;
pub mod losses;
pub mod posterior;
pub mod special;
pub mod wass_calculus;

pub use error::{Error, Result};
