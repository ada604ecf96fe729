//! Squared 2-Wasserstein loss between unit-scale power-tail (Pareto)
//! distributions, parametrized by shape.
//!
//! For shapes t, ϑ > 2 the quantile maps are u ↦ (1−u)^(−1/s), and the
//! squared distance evaluates in closed form to
//!
//! ```text
//! ℓ(t, ϑ) = 2 (t − ϑ)² / ((tϑ − t − ϑ)(t − 2)(ϑ − 2)),
//! ```
//!
//! with gradient
//!
//! ```text
//! ∂ℓ/∂t = 2 (t − ϑ) ((2ϑ − 1)t − 3ϑ) / ((t − 2)² ((ϑ − 1)t − ϑ)²),
//! ```
//!
//! and exact quadratic expansion ℓ = a(ϑ)(t−ϑ)² + ξ(t, ϑ) where
//! a(ϑ) = 2/(ϑ(ϑ−2)³) and
//!
//! ```text
//! ξ(t, ϑ) = 2 (t − ϑ)² [ϑ(ϑ−2)² − (t−2)(tϑ−t−ϑ)]
//!           / [(t−2)(ϑ−2)³ ϑ (tϑ−t−ϑ)].
//! ```
//!
//! The shape floor 2 keeps second moments finite; the operational box stops
//! slightly above it because the loss blows up like 1/(t−2) at the boundary.

use crate::error::{Error, Result};
use crate::losses::{expect_dim, Domain, Loss, QuadExpansion};

/// Operational shape box: strictly inside the mathematical domain (2, ∞),
/// wide enough for every experiment in the crate.
pub const PARETO_SHAPE_BOX: (f64, f64) = (2.05, 200.0);

fn check_shape(op: &'static str, label: &str, s: f64) -> Result<()> {
    if s.is_finite() && s > 2.0 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("{label} shape must exceed 2, got {s}")))
    }
}

/// Squared 2-Wasserstein distance between unit-scale Pareto laws with shapes
/// t and ϑ.
pub fn w2sq_pareto(t: f64, theta: f64) -> Result<f64> {
    check_shape("w2sq_pareto", "candidate", t)?;
    check_shape("w2sq_pareto", "parameter", theta)?;
    let d = t - theta;
    Ok(2.0 * d * d / ((t * theta - t - theta) * (t - 2.0) * (theta - 2.0)))
}

/// ∂/∂t of [`w2sq_pareto`].
pub fn w2sq_pareto_grad(t: f64, theta: f64) -> Result<f64> {
    check_shape("w2sq_pareto_grad", "candidate", t)?;
    check_shape("w2sq_pareto_grad", "parameter", theta)?;
    let denom_a = (t - 2.0) * (t - 2.0);
    let denom_b = (theta - 1.0) * t - theta;
    Ok(2.0 * (t - theta) * ((2.0 * theta - 1.0) * t - 3.0 * theta) / (denom_a * denom_b * denom_b))
}

fn quad_a(theta: f64) -> f64 {
    let m = theta - 2.0;
    2.0 / (theta * m * m * m)
}

fn quad_xi(t: f64, theta: f64) -> f64 {
    let d = t - theta;
    let m = theta - 2.0;
    let cross = t * theta - t - theta;
    let numer = theta * m * m - (t - 2.0) * cross;
    2.0 * d * d * numer / ((t - 2.0) * m * m * m * theta * cross)
}

/// Squared 2-Wasserstein loss on Pareto shapes.
#[derive(Clone, Copy, Debug, Default)]
pub struct W2SqPareto;

impl Loss for W2SqPareto {
    fn name(&self) -> &'static str {
        "w2sq-pareto"
    }

    fn dim(&self) -> usize {
        1
    }

    fn domain(&self) -> Domain {
        Domain::Box(vec![PARETO_SHAPE_BOX])
    }

    fn eval(&self, t: &[f64], theta: &[f64]) -> Result<f64> {
        expect_dim("w2sq-pareto", 1, t)?;
        expect_dim("w2sq-pareto", 1, theta)?;
        w2sq_pareto(t[0], theta[0])
    }

    fn grad_t(&self, t: &[f64], theta: &[f64]) -> Result<Option<Vec<f64>>> {
        expect_dim("w2sq-pareto", 1, t)?;
        expect_dim("w2sq-pareto", 1, theta)?;
        Ok(Some(vec![w2sq_pareto_grad(t[0], theta[0])?]))
    }

    fn eval_batch_sum(&self, t: &[f64], draws: &[f64]) -> Result<f64> {
        expect_dim("w2sq-pareto", 1, t)?;
        let mut acc = 0.0;
        for &theta in draws {
            acc += w2sq_pareto(t[0], theta)?;
        }
        Ok(acc)
    }

    fn quad_expansion(&self) -> Option<QuadExpansion> {
        Some(QuadExpansion { a: quad_a, xi: quad_xi })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::quad::integrate;

    /// Quantile-difference quadrature oracle for the squared distance:
    /// ∫₀¹ ((1−u)^(−1/t) − (1−u)^(−1/ϑ))² du, written in v = 1 − u so the
    /// integrable singularity sits at v = 0 where bisection can chase it.
    fn oracle(t: f64, theta: f64) -> f64 {
        integrate(
            |v| {
                let d = v.powf(-1.0 / t) - v.powf(-1.0 / theta);
                d * d
            },
            0.0,
            1.0,
            1e-11,
        )
        .unwrap()
    }

    #[test]
    fn pinned_value() {
        // ℓ(3,4) = 2·1/((12−7)·1·2) = 0.2.
        assert!((w2sq_pareto(3.0, 4.0).unwrap() - 0.2).abs() < 1e-15);
        assert!((w2sq_pareto_grad(3.0, 4.0).unwrap() + 0.72).abs() < 1e-15);
    }

    #[test]
    fn matches_quantile_quadrature_oracle() {
        for &(t, theta) in &[(3.0, 4.0), (2.5, 2.6), (5.5, 3.1), (2.2, 8.0)] {
            let got = w2sq_pareto(t, theta).unwrap();
            let want = oracle(t, theta);
            assert!(
                (got - want).abs() < 1e-8 * (1.0 + want),
                "({t},{theta}): {got} vs {want}"
            );
        }
    }

    #[test]
    fn oracle_moment_identity() {
        // The same integral in moment form: t/(t−2) + ϑ/(ϑ−2) − 2tϑ/(tϑ−t−ϑ).
        for &(t, theta) in &[(3.0, 4.0), (2.5, 6.0), (4.4, 4.4)] {
            let moment =
                t / (t - 2.0) + theta / (theta - 2.0) - 2.0 * t * theta / (t * theta - t - theta);
            let direct = w2sq_pareto(t, theta).unwrap();
            assert!((moment - direct).abs() < 1e-12 * (1.0 + direct), "({t},{theta})");
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let h = 1e-6;
        for &(t, theta) in &[(3.0, 4.0), (2.5, 2.8), (6.0, 3.3), (4.0, 4.0)] {
            let fd = (w2sq_pareto(t + h, theta).unwrap() - w2sq_pareto(t - h, theta).unwrap())
                / (2.0 * h);
            let grad = w2sq_pareto_grad(t, theta).unwrap();
            assert!((fd - grad).abs() < 1e-6 * (1.0 + grad.abs()), "({t},{theta}): {grad} vs {fd}");
        }
    }

    #[test]
    fn quad_expansion_is_exact_decomposition() {
        let q = W2SqPareto.quad_expansion().unwrap();
        for i in 0..12 {
            let t = 2.3 + 0.4 * i as f64;
            for j in 0..12 {
                let theta = 2.3 + 0.4 * j as f64;
                let whole = w2sq_pareto(t, theta).unwrap();
                let parts = (q.a)(theta) * (t - theta) * (t - theta) + (q.xi)(t, theta);
                assert!(
                    (whole - parts).abs() < 1e-12 * (1.0 + whole.abs()),
                    "({t},{theta}): {whole} vs {parts}"
                );
            }
        }
    }

    #[test]
    fn quad_coefficient_reference_values() {
        // a(3) = 2/3 (the curvature constant 4/(ϑ(ϑ−2)³) halved) and the
        // remainder at (2.5, 3) recovers eval minus the quadratic part.
        let q = W2SqPareto.quad_expansion().unwrap();
        assert!(((q.a)(3.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!(((q.a)(4.0) - 0.0625).abs() < 1e-15);
        let eval = w2sq_pareto(2.5, 3.0).unwrap();
        let expected_xi = eval - (2.0 / 3.0) * 0.25;
        assert!(((q.xi)(2.5, 3.0) - expected_xi).abs() < 1e-14);
    }

    #[test]
    fn quad_remainder_is_third_order() {
        let q = W2SqPareto.quad_expansion().unwrap();
        let theta = 4.0;
        for k in 3..=9 {
            let delta = 0.5_f64.powi(k);
            let ratio = ((q.xi)(theta + delta, theta)).abs() / (delta * delta);
            // ξ/δ² should shrink proportionally to δ.
            assert!(ratio < 0.2 * delta / 0.125 + 1e-9, "delta {delta}: ratio {ratio}");
        }
    }

    #[test]
    fn loss_grows_near_boundary() {
        // The 1/(t−2) blow-up motivates the operational box floor at 2.05.
        let near = w2sq_pareto(2.01, 4.0).unwrap();
        let far = w2sq_pareto(3.0, 4.0).unwrap();
        assert!(near > 10.0 * far);
    }

    #[test]
    fn domain_errors() {
        assert!(w2sq_pareto(2.0, 3.0).is_err());
        assert!(w2sq_pareto(3.0, 1.9).is_err());
        assert!(w2sq_pareto_grad(f64::NAN, 3.0).is_err());
        assert!(W2SqPareto.eval(&[3.0], &[3.0, 4.0]).is_err());
    }
}
