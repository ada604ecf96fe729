//! 1-Wasserstein loss on the Gompertz shape family.
//!
//! The Gompertz CDF F_ϑ(x) = 1 − exp(−ϑ(eˣ − 1)) is pointwise monotone in ϑ,
//! so the 1-Wasserstein distance between two members collapses to the
//! difference of their means, and the mean has the closed form e^ϑ·E₁(ϑ):
//!
//! ```text
//! W₁(P_t, P_ϑ) = |e^ϑ·E₁(ϑ) − e^t·E₁(t)|.
//! ```

use crate::error::Result;
use crate::losses::{check_positive, expect_dim, Domain, Loss};
use crate::special::e1::exp_integral_e1_scaled;

/// Positive half-line box used as the search domain for shape parameters.
const POSITIVE_BOX: (f64, f64) = (1e-12, 1e12);

/// W₁ distance between Gompertz(t) and Gompertz(ϑ): |e^ϑE₁(ϑ) − e^tE₁(t)|.
pub fn w1_gompertz(t: f64, theta: f64) -> Result<f64> {
    check_positive("w1_gompertz", "t", t)?;
    check_positive("w1_gompertz", "theta", theta)?;
    Ok((exp_integral_e1_scaled(theta)? - exp_integral_e1_scaled(t)?).abs())
}

/// 1-Wasserstein loss on the Gompertz family (scalar shape parameter).
///
/// The loss is locally first order with ϑ-dependent slope
/// |∂ϑ e^ϑE₁(ϑ)| = 1/ϑ − e^ϑE₁(ϑ), so no parameter-free local limit is
/// exposed.
#[derive(Clone, Copy, Debug, Default)]
pub struct W1Gompertz;

impl Loss for W1Gompertz {
    fn name(&self) -> &'static str {
        "w1-gompertz"
    }

    fn dim(&self) -> usize {
        1
    }

    fn domain(&self) -> Domain {
        Domain::Box(vec![POSITIVE_BOX])
    }

    fn eval(&self, t: &[f64], theta: &[f64]) -> Result<f64> {
        expect_dim("w1-gompertz", 1, t)?;
        expect_dim("w1-gompertz", 1, theta)?;
        w1_gompertz(t[0], theta[0])
    }

    fn local_order(&self) -> f64 {
        1.0
    }

    fn eval_batch_sum(&self, t: &[f64], draws: &[f64]) -> Result<f64> {
        expect_dim("w1-gompertz", 1, t)?;
        let mean_t = exp_integral_e1_scaled(t[0])?;
        let mut acc = 0.0;
        for &theta in draws {
            acc += (exp_integral_e1_scaled(theta)? - mean_t).abs();
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::quad::integrate_half_line;

    fn gompertz_cdf(theta: f64, x: f64) -> f64 {
        -(-theta * x.exp_m1()).exp_m1()
    }

    #[test]
    fn pinned_value() {
        // |e²E₁(2) − e·E₁(1)| for shapes (1, 2).
        let v = w1_gompertz(1.0, 2.0).unwrap();
        assert!((v - 0.2350187454349715).abs() < 1e-12, "got {v}");
        assert_eq!(w1_gompertz(3.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn symmetry_and_separation() {
        let a = w1_gompertz(0.5, 4.0).unwrap();
        let b = w1_gompertz(4.0, 0.5).unwrap();
        assert_eq!(a, b);
        assert!(a > 0.0);
    }

    #[test]
    fn matches_cdf_area_quadrature_oracle() {
        // W₁ = ∫₀^∞ |F_t − F_ϑ| dx; monotonicity in ϑ makes the integrand
        // single-signed, so this checks the mean identity end to end.
        for &(t, theta) in &[(1.0, 2.0), (0.4, 0.9), (2.5, 7.0)] {
            let oracle = integrate_half_line(
                |x| (gompertz_cdf(t, x) - gompertz_cdf(theta, x)).abs(),
                0.0,
                1e-11,
            )
            .unwrap();
            let got = w1_gompertz(t, theta).unwrap();
            assert!((got - oracle).abs() < 1e-9, "({t},{theta}): {got} vs {oracle}");
        }
    }

    #[test]
    fn local_slope_matches_mean_derivative() {
        // d/ds e^s E₁(s) = e^s E₁(s) − 1/s; at s = 2 the magnitude is
        // 1/2 − e²E₁(2) ≈ 0.138671.
        let theta = 2.0;
        let slope = 0.13867138311177742;
        for &eps in &[1e-4, 1e-5] {
            let v = w1_gompertz(theta, theta + eps).unwrap() / eps;
            assert!((v - slope).abs() < 10.0 * eps, "eps {eps}: {v} vs {slope}");
        }
    }

    #[test]
    fn loss_adapter_and_batch() {
        let loss = W1Gompertz;
        let single = loss.eval(&[1.0], &[2.0]).unwrap();
        assert_eq!(single, w1_gompertz(1.0, 2.0).unwrap());
        let batch = loss.eval_batch_sum(&[1.0], &[2.0, 3.0]).unwrap();
        let expect = w1_gompertz(1.0, 2.0).unwrap() + w1_gompertz(1.0, 3.0).unwrap();
        assert!((batch - expect).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(w1_gompertz(0.0, 1.0).is_err());
        assert!(w1_gompertz(1.0, -2.0).is_err());
        assert!(W1Gompertz.eval(&[1.0, 2.0], &[1.0]).is_err());
    }
}
