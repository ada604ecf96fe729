//! Numerical substrate: special functions, quadrature, small linear algebra,
//! samplers, and deterministic random streams.
//!
//! Everything here is deterministic and allocation-light; the rest of the
//! crate builds on these primitives.

pub mod beta_fn;
pub mod e1;
pub mod gamma_fn;
pub mod mat2;
pub mod normal;
pub mod quad;
pub mod rng;
pub mod samplers;

pub use beta_fn::{beta_median, beta_quantile, ln_beta, reg_inc_beta};
pub use e1::{exp_integral_e1, exp_integral_e1_scaled};
pub use gamma_fn::{gamma_quantile, ln_gamma, reg_lower_gamma};
pub use mat2::{spd2_sqrt, SymMat2};
pub use normal::{normal_cdf, normal_pdf, normal_quantile};
pub use quad::{integrate, integrate_half_line};
