//! Loss functions ℓ(t, ϑ) between a candidate parameter t and a model
//! parameter ϑ, in closed form.
//!
//! Each loss is available both as a plain function (for direct evaluation and
//! oracle comparisons) and as a [`Loss`] implementation (for posterior-risk
//! minimization, which needs a uniform vector interface, domain metadata, and
//! a batched evaluation path).
//!
//! Conventions shared by every loss:
//!
//! * ℓ(t, ϑ) ≥ 0 with equality iff t = ϑ;
//! * `dim` is the length of the parameter vectors fed to `eval`;
//! * `local_order` p and `local_limit` ℓ₀ describe the small-perturbation
//!   behavior ℓ(ϑ + εt, ϑ + εh) = ε^p·ℓ₀(t, h) + o(ε^p) when ℓ₀ does not
//!   depend on the base point ϑ;
//! * `quad_expansion`, when present, gives the exact decomposition
//!   ℓ(t, ϑ) = a(ϑ)·(t − ϑ)² + ξ(t, ϑ) with ξ of third order near t = ϑ.

mod exp_family;
mod gaussian;
mod gompertz;
mod pareto;
mod simplex_losses;

pub use exp_family::{hellinger_exp, kl_exp, stein_variance, w2sq_exp};
pub use exp_family::{HellingerExp, KlExp, SteinVariance, W2SqExp};
pub use gaussian::{
    norm_power, sinkhorn_centered, sinkhorn_gauss2, tv_gauss, w2sq_gauss2, GaussParams, NormPower,
    SinkhornGauss2, TvGaussLocation,
};
pub use gompertz::{w1_gompertz, W1Gompertz};
pub use pareto::{w2sq_pareto, w2sq_pareto_grad, W2SqPareto, PARETO_SHAPE_BOX};
pub use simplex_losses::{l1_reparam, w2sq_multinomial, L1Reparam, W2SqMultinomial};

use crate::error::{Error, Result};

/// Where a loss accepts parameter vectors.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// Per-coordinate closed box [lo, hi].
    Box(Vec<(f64, f64)>),
    /// Free coordinates of a probability simplex over `dim` categories:
    /// {x ∈ ℝ^(dim−1) : xᵢ ≥ margin, Σxᵢ ≤ 1 − margin}.
    Simplex { dim: usize, margin: f64 },
}

impl Domain {
    /// Dimension of vectors living in this domain.
    pub fn dim(&self) -> usize {
        match self {
            Domain::Box(b) => b.len(),
            Domain::Simplex { dim, .. } => dim - 1,
        }
    }

    pub fn contains(&self, t: &[f64]) -> bool {
        if t.len() != self.dim() || t.iter().any(|x| !x.is_finite()) {
            return false;
        }
        match self {
            Domain::Box(b) => t.iter().zip(b).all(|(&x, &(lo, hi))| x >= lo && x <= hi),
            Domain::Simplex { margin, .. } => {
                t.iter().all(|&x| x >= *margin) && t.iter().sum::<f64>() <= 1.0 - margin
            }
        }
    }

    /// Project `t` onto the domain in place; returns true if `t` moved.
    ///
    /// Boxes clamp per coordinate. Simplices clamp to the margin and then
    /// shrink any excess mass proportionally toward the margin corner so the
    /// sum constraint holds again.
    pub fn project(&self, t: &mut [f64]) -> bool {
        let mut moved = false;
        match self {
            Domain::Box(b) => {
                for (x, &(lo, hi)) in t.iter_mut().zip(b) {
                    let clamped = x.clamp(lo, hi);
                    if clamped != *x {
                        *x = clamped;
                        moved = true;
                    }
                }
            }
            Domain::Simplex { margin, .. } => {
                let margin = *margin;
                for x in t.iter_mut() {
                    let clamped = if x.is_nan() { margin } else { x.max(margin) };
                    if clamped != *x {
                        *x = clamped;
                        moved = true;
                    }
                }
                let sum: f64 = t.iter().sum();
                let cap = 1.0 - margin;
                if sum > cap {
                    // Scale the offsets above the margin so the total lands
                    // exactly on the cap; denominators are positive here.
                    let k = t.len() as f64;
                    let scale = (cap - k * margin) / (sum - k * margin);
                    for x in t.iter_mut() {
                        *x = margin + (*x - margin) * scale;
                    }
                    // Roundoff can leave the sum a few ulps above the cap;
                    // shave the excess off the largest coordinate.
                    for _ in 0..2 {
                        let excess = t.iter().sum::<f64>() - cap;
                        if excess <= 0.0 {
                            break;
                        }
                        if let Some(largest) = t
                            .iter_mut()
                            .max_by(|a, b| a.partial_cmp(b).expect("finite after clamp"))
                        {
                            *largest -= excess;
                        }
                    }
                    moved = true;
                }
            }
        }
        moved
    }
}

/// Exact second-order decomposition of a scalar-parameter loss around its
/// minimum: ℓ(t, ϑ) = a(ϑ)·(t − ϑ)² + ξ(t, ϑ).
#[derive(Clone, Copy)]
pub struct QuadExpansion {
    /// Quadratic coefficient a(ϑ).
    pub a: fn(f64) -> f64,
    /// Remainder ξ(t, ϑ), O(|t − ϑ|³) near t = ϑ.
    pub xi: fn(f64, f64) -> f64,
}

/// A loss function ℓ(t, ϑ) with the metadata posterior-risk minimization
/// needs.
pub trait Loss: Send + Sync {
    fn name(&self) -> &'static str;

    /// Length of the parameter vectors `eval` expects.
    fn dim(&self) -> usize;

    /// Operational domain for both arguments.
    fn domain(&self) -> Domain;

    fn eval(&self, t: &[f64], theta: &[f64]) -> Result<f64>;

    /// ∇_t ℓ(t, ϑ) when a closed form exists.
    fn grad_t(&self, _t: &[f64], _theta: &[f64]) -> Result<Option<Vec<f64>>> {
        Ok(None)
    }

    /// Order p of the small-perturbation expansion.
    fn local_order(&self) -> f64 {
        2.0
    }

    /// Base-point-free local limit ℓ₀(t, h), when one exists.
    fn local_limit(&self, _t: &[f64], _h: &[f64]) -> Option<f64> {
        None
    }

    /// Exact quadratic expansion around the minimum (scalar losses).
    fn quad_expansion(&self) -> Option<QuadExpansion> {
        None
    }

    /// Σᵢ ℓ(t, ϑᵢ) over rows of a flat row-major draw matrix. The default
    /// loops over `eval`; hot losses override it with a fused loop.
    fn eval_batch_sum(&self, t: &[f64], draws: &[f64]) -> Result<f64> {
        let d = self.dim();
        debug_assert_eq!(draws.len() % d, 0);
        let mut acc = 0.0;
        for row in draws.chunks_exact(d) {
            acc += self.eval(t, row)?;
        }
        Ok(acc)
    }
}

pub(crate) fn expect_dim(op: &'static str, expected: usize, v: &[f64]) -> Result<()> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(Error::dimension(op, format!("expected {expected} coordinates, got {}", v.len())))
    }
}

pub(crate) fn check_positive(op: &'static str, label: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("{label} must be positive and finite, got {v}")))
    }
}
