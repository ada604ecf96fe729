//! Losses between exponential distributions (rate parametrization), plus the
//! Stein variance discrepancy for centered Gaussians.
//!
//! Closed forms used here (P_r denotes the exponential law with rate r):
//!
//! * squared Hellinger:  ℓ_H(t, ϑ) = 1 − 2√(tϑ)/(t + ϑ);
//! * squared 2-Wasserstein:  ℓ_W(t, ϑ) = 2·(1/t − 1/ϑ)², since the quantile
//!   map is linear in 1/rate and ∫₀¹ ln²(1−u) du = 2;
//! * Kullback–Leibler with the candidate as reference measure:
//!   ℓ_KL(t, ϑ) = ln ϑ − ln t + t/ϑ − 1;
//! * Stein discrepancy between N(0, ϑ) and N(0, t):
//!   ℓ_S(t, ϑ) = ϑ/t − ln(ϑ/t) − 1, which equals twice the corresponding
//!   Gaussian Kullback–Leibler divergence.

use crate::error::Result;
use crate::losses::{check_positive, expect_dim, Domain, Loss, QuadExpansion};

/// Wide operational box for positive scalar parameters.
const POSITIVE_BOX: (f64, f64) = (1e-12, 1e12);

fn check_pair(op: &'static str, t: f64, theta: f64) -> Result<()> {
    check_positive(op, "candidate", t)?;
    check_positive(op, "parameter", theta)
}

/// Squared Hellinger distance between exponentials with rates t and ϑ.
pub fn hellinger_exp(t: f64, theta: f64) -> Result<f64> {
    check_pair("hellinger_exp", t, theta)?;
    // Written with a stable difference: 1 − 2√(tϑ)/(t+ϑ) = (√t − √ϑ)²/(t+ϑ).
    let diff = t.sqrt() - theta.sqrt();
    Ok(diff * diff / (t + theta))
}

/// Squared 2-Wasserstein distance between exponentials with rates t and ϑ.
pub fn w2sq_exp(t: f64, theta: f64) -> Result<f64> {
    check_pair("w2sq_exp", t, theta)?;
    let diff = 1.0 / t - 1.0 / theta;
    Ok(2.0 * diff * diff)
}

/// Kullback–Leibler divergence KL(P_ϑ ‖ P_t) between exponentials.
pub fn kl_exp(t: f64, theta: f64) -> Result<f64> {
    check_pair("kl_exp", t, theta)?;
    let r = t / theta;
    Ok(r - r.ln() - 1.0)
}

/// Stein variance discrepancy between N(0, ϑ) and N(0, t).
pub fn stein_variance(t: f64, theta: f64) -> Result<f64> {
    check_pair("stein_variance", t, theta)?;
    let r = theta / t;
    Ok(r - r.ln() - 1.0)
}

macro_rules! scalar_loss {
    ($(#[$meta:meta])* $name:ident, $label:literal, $func:path) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, Default)]
        pub struct $name;

        impl Loss for $name {
            fn name(&self) -> &'static str {
                $label
            }

            fn dim(&self) -> usize {
                1
            }

            fn domain(&self) -> Domain {
                Domain::Box(vec![POSITIVE_BOX])
            }

            fn eval(&self, t: &[f64], theta: &[f64]) -> Result<f64> {
                expect_dim($label, 1, t)?;
                expect_dim($label, 1, theta)?;
                $func(t[0], theta[0])
            }

            fn eval_batch_sum(&self, t: &[f64], draws: &[f64]) -> Result<f64> {
                expect_dim($label, 1, t)?;
                let mut acc = 0.0;
                for &theta in draws {
                    acc += $func(t[0], theta)?;
                }
                Ok(acc)
            }

            fn quad_expansion(&self) -> Option<QuadExpansion> {
                Some(QuadExpansion { a: $name::QUAD_A, xi: $name::QUAD_XI })
            }
        }
    };
}

scalar_loss!(
    /// Squared Hellinger loss on exponential rates.
    HellingerExp,
    "hellinger-exp",
    hellinger_exp
);
scalar_loss!(
    /// Squared 2-Wasserstein loss on exponential rates.
    W2SqExp,
    "w2sq-exp",
    w2sq_exp
);
scalar_loss!(
    /// Kullback–Leibler loss on exponential rates.
    KlExp,
    "kl-exp",
    kl_exp
);
scalar_loss!(
    /// Stein variance loss on Gaussian scale.
    SteinVariance,
    "stein-variance",
    stein_variance
);

// Quadratic coefficients a(ϑ) = ½·∂²ℓ/∂t²|_{t=ϑ} and exact remainders
// ξ = ℓ − a(ϑ)(t−ϑ)² for each scalar loss.
impl HellingerExp {
    const QUAD_A: fn(f64) -> f64 = |theta| 1.0 / (8.0 * theta * theta);
    const QUAD_XI: fn(f64, f64) -> f64 = |t, theta| {
        let d = t - theta;
        hellinger_exp(t, theta).expect("domain-checked") - d * d / (8.0 * theta * theta)
    };
}

impl W2SqExp {
    const QUAD_A: fn(f64) -> f64 = |theta| 2.0 / theta.powi(4);
    const QUAD_XI: fn(f64, f64) -> f64 = |t, theta| {
        let d = t - theta;
        w2sq_exp(t, theta).expect("domain-checked") - 2.0 * d * d / theta.powi(4)
    };
}

impl KlExp {
    const QUAD_A: fn(f64) -> f64 = |theta| 0.5 / (theta * theta);
    const QUAD_XI: fn(f64, f64) -> f64 = |t, theta| {
        let d = t - theta;
        kl_exp(t, theta).expect("domain-checked") - 0.5 * d * d / (theta * theta)
    };
}

impl SteinVariance {
    const QUAD_A: fn(f64) -> f64 = |theta| 0.5 / (theta * theta);
    const QUAD_XI: fn(f64, f64) -> f64 = |t, theta| {
        let d = t - theta;
        stein_variance(t, theta).expect("domain-checked") - 0.5 * d * d / (theta * theta)
    };
}
