//! Parametric sampling models.
//!
//! Three univariate families indexed by a scalar parameter (exponential by
//! rate, power-tail by shape, Gompertz by shape), the multinomial family in
//! its (d−1)-coordinate simplex parametrization, and an identity-covariance
//! Gaussian location family. Each exposes density, CDF, quantile, Fisher
//! information, and a deterministic sampler tied to an explicit RNG stream.

use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::special::mat2::SymMat2;
use crate::special::samplers::{
    sample_categorical_counts, sample_standard_normal, sample_std_exponential,
};

/// A model {P_ϑ : ϑ ∈ (lo, hi)} on the real line with scalar parameter.
pub trait UnivariateFamily {
    fn name(&self) -> &'static str;

    /// Open parameter interval (lo, hi).
    fn theta_domain(&self) -> (f64, f64);

    fn density(&self, theta: f64, x: f64) -> Result<f64>;
    fn cdf(&self, theta: f64, x: f64) -> Result<f64>;
    fn quantile(&self, theta: f64, u: f64) -> Result<f64>;

    /// Fisher information I(ϑ).
    fn fisher_info(&self, theta: f64) -> Result<f64>;

    /// `n` i.i.d. draws from P_ϑ.
    fn sample(&self, theta: f64, n: usize, rng: &mut ChaCha12Rng) -> Result<Vec<f64>>;

    fn check_theta(&self, op: &'static str, theta: f64) -> Result<()> {
        let (lo, hi) = self.theta_domain();
        if theta.is_finite() && theta > lo && theta < hi {
            Ok(())
        } else {
            Err(Error::domain(op, format!("{} parameter {theta} outside ({lo}, {hi})", self.name())))
        }
    }
}

fn check_unit(op: &'static str, u: f64) -> Result<()> {
    if (0.0..1.0).contains(&u) {
        Ok(())
    } else {
        Err(Error::domain(op, format!("quantile level {u} outside [0, 1)")))
    }
}

/// Exponential distribution with rate ϑ > 0: density ϑ·e^(−ϑx) on x ≥ 0.
#[derive(Clone, Copy, Debug, Default)]
pub struct Exponential;

impl UnivariateFamily for Exponential {
    fn name(&self) -> &'static str {
        "exponential"
    }

    fn theta_domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn density(&self, theta: f64, x: f64) -> Result<f64> {
        self.check_theta("Exponential::density", theta)?;
        Ok(if x < 0.0 { 0.0 } else { theta * (-theta * x).exp() })
    }

    fn cdf(&self, theta: f64, x: f64) -> Result<f64> {
        self.check_theta("Exponential::cdf", theta)?;
        Ok(if x < 0.0 { 0.0 } else { -(-theta * x).exp_m1() })
    }

    fn quantile(&self, theta: f64, u: f64) -> Result<f64> {
        self.check_theta("Exponential::quantile", theta)?;
        check_unit("Exponential::quantile", u)?;
        Ok(-(-u).ln_1p() / theta)
    }

    fn fisher_info(&self, theta: f64) -> Result<f64> {
        self.check_theta("Exponential::fisher_info", theta)?;
        Ok(1.0 / (theta * theta))
    }

    fn sample(&self, theta: f64, n: usize, rng: &mut ChaCha12Rng) -> Result<Vec<f64>> {
        self.check_theta("Exponential::sample", theta)?;
        Ok((0..n).map(|_| sample_std_exponential(rng) / theta).collect())
    }
}

/// Power-tail (Pareto) distribution with unit scale and shape ϑ > 2:
/// density ϑ·x^(−ϑ−1) on x ≥ 1. The shape floor keeps second moments
/// finite, which the quadratic-transport losses require.
#[derive(Clone, Copy, Debug, Default)]
pub struct ParetoShape;

impl UnivariateFamily for ParetoShape {
    fn name(&self) -> &'static str {
        "pareto-shape"
    }

    fn theta_domain(&self) -> (f64, f64) {
        (2.0, f64::INFINITY)
    }

    fn density(&self, theta: f64, x: f64) -> Result<f64> {
        self.check_theta("ParetoShape::density", theta)?;
        Ok(if x < 1.0 { 0.0 } else { theta * x.powf(-theta - 1.0) })
    }

    fn cdf(&self, theta: f64, x: f64) -> Result<f64> {
        self.check_theta("ParetoShape::cdf", theta)?;
        Ok(if x < 1.0 { 0.0 } else { 1.0 - x.powf(-theta) })
    }

    fn quantile(&self, theta: f64, u: f64) -> Result<f64> {
        self.check_theta("ParetoShape::quantile", theta)?;
        check_unit("ParetoShape::quantile", u)?;
        Ok((1.0 - u).powf(-1.0 / theta))
    }

    fn fisher_info(&self, theta: f64) -> Result<f64> {
        self.check_theta("ParetoShape::fisher_info", theta)?;
        Ok(1.0 / (theta * theta))
    }

    fn sample(&self, theta: f64, n: usize, rng: &mut ChaCha12Rng) -> Result<Vec<f64>> {
        self.check_theta("ParetoShape::sample", theta)?;
        // Inverse CDF on a uniform; exp-of-exponential keeps precision in
        // the far tail: x = e^(E/ϑ) with E standard exponential.
        Ok((0..n).map(|_| (sample_std_exponential(rng) / theta).exp()).collect())
    }
}

/// Unit-scale Gompertz distribution with shape ϑ > 0:
/// CDF 1 − exp(−ϑ(eˣ − 1)) on x ≥ 0.
#[derive(Clone, Copy, Debug, Default)]
pub struct Gompertz;

impl UnivariateFamily for Gompertz {
    fn name(&self) -> &'static str {
        "gompertz"
    }

    fn theta_domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn density(&self, theta: f64, x: f64) -> Result<f64> {
        self.check_theta("Gompertz::density", theta)?;
        if x < 0.0 {
            return Ok(0.0);
        }
        // ϑ·exp(ϑ + x − ϑeˣ); the exponent is assembled in log space so the
        // double-exponential tail underflows gracefully to 0.
        Ok((theta.ln() + theta + x - theta * x.exp()).exp())
    }

    fn cdf(&self, theta: f64, x: f64) -> Result<f64> {
        self.check_theta("Gompertz::cdf", theta)?;
        if x < 0.0 {
            return Ok(0.0);
        }
        Ok(-(-theta * x.exp_m1()).exp_m1())
    }

    fn quantile(&self, theta: f64, u: f64) -> Result<f64> {
        self.check_theta("Gompertz::quantile", theta)?;
        check_unit("Gompertz::quantile", u)?;
        Ok(((-(-u).ln_1p()) / theta).ln_1p())
    }

    fn fisher_info(&self, theta: f64) -> Result<f64> {
        self.check_theta("Gompertz::fisher_info", theta)?;
        // eˣ − 1 is Exponential(ϑ) under P_ϑ, and the score is
        // 1/ϑ − (eˣ − 1), whose variance is 1/ϑ².
        Ok(1.0 / (theta * theta))
    }

    fn sample(&self, theta: f64, n: usize, rng: &mut ChaCha12Rng) -> Result<Vec<f64>> {
        self.check_theta("Gompertz::sample", theta)?;
        Ok((0..n)
            .map(|_| (sample_std_exponential(rng) / theta).ln_1p())
            .collect())
    }
}

/// Multinomial model over d ≥ 2 categories, parametrized by the first d−1
/// cell probabilities; the last probability is 1 minus their sum.
#[derive(Clone, Copy, Debug)]
pub struct Multinomial {
    pub dim: usize,
}

impl Multinomial {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::dimension("Multinomial::new", "need at least two categories"));
        }
        Ok(Multinomial { dim })
    }

    pub fn name(&self) -> &'static str {
        "multinomial"
    }

    /// Validate a (d−1)-coordinate parameter: strictly positive cells with
    /// strictly positive remainder.
    pub fn check_theta(&self, op: &'static str, theta: &[f64]) -> Result<()> {
        if theta.len() != self.dim - 1 {
            return Err(Error::dimension(
                op,
                format!("expected {} coordinates, got {}", self.dim - 1, theta.len()),
            ));
        }
        if theta.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::domain(op, "cell probabilities must be positive"));
        }
        let sum: f64 = theta.iter().sum();
        if !(sum < 1.0) {
            return Err(Error::domain(op, format!("cell probabilities sum to {sum} >= 1")));
        }
        Ok(())
    }

    /// Full probability vector (p₁, …, p_d) from the free coordinates.
    pub fn full_probs(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_theta("Multinomial::full_probs", theta)?;
        let mut p = theta.to_vec();
        p.push(1.0 - theta.iter().sum::<f64>());
        Ok(p)
    }

    /// Fisher information matrix diag(1/p_k) + (1/p_d)·𝟙𝟙ᵀ, row-major
    /// (d−1)×(d−1).
    pub fn fisher_info(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let p = self.full_probs(theta)?;
        let k = self.dim - 1;
        let last = p[k];
        let mut out = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                out[i * k + j] = 1.0 / last + if i == j { 1.0 / p[i] } else { 0.0 };
            }
        }
        Ok(out)
    }

    /// Inverse Fisher information diag(p) − p·pᵀ over the free coordinates.
    pub fn fisher_info_inverse(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_theta("Multinomial::fisher_info_inverse", theta)?;
        let k = self.dim - 1;
        let mut out = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                out[i * k + j] = -theta[i] * theta[j] + if i == j { theta[i] } else { 0.0 };
            }
        }
        Ok(out)
    }

    /// Fisher information as a 2×2 matrix (three-category models only).
    pub fn fisher_info_2d(&self, theta: &[f64]) -> Result<SymMat2> {
        self.expect_three_categories("Multinomial::fisher_info_2d")?;
        let m = self.fisher_info(theta)?;
        Ok(SymMat2::new(m[0], m[1], m[3]))
    }

    /// Inverse Fisher information as a 2×2 matrix (three-category models).
    pub fn fisher_info_inverse_2d(&self, theta: &[f64]) -> Result<SymMat2> {
        self.expect_three_categories("Multinomial::fisher_info_inverse_2d")?;
        let m = self.fisher_info_inverse(theta)?;
        Ok(SymMat2::new(m[0], m[1], m[3]))
    }

    fn expect_three_categories(&self, op: &'static str) -> Result<()> {
        if self.dim == 3 {
            Ok(())
        } else {
            Err(Error::dimension(op, format!("requires d = 3, model has d = {}", self.dim)))
        }
    }

    /// Category counts of n i.i.d. draws.
    pub fn sample_counts(&self, theta: &[f64], n: u64, rng: &mut ChaCha12Rng) -> Result<Vec<u64>> {
        let p = self.full_probs(theta)?;
        sample_categorical_counts(&p, n, rng)
    }
}

/// Gaussian location family N(t, I_d) with known identity covariance.
#[derive(Clone, Copy, Debug)]
pub struct GaussianLocation {
    pub dim: usize,
}

impl GaussianLocation {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::dimension("GaussianLocation::new", "dimension must be positive"));
        }
        Ok(GaussianLocation { dim })
    }

    pub fn name(&self) -> &'static str {
        "gaussian-location"
    }

    fn check_point(&self, op: &'static str, label: &str, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::dimension(
                op,
                format!("{label} has {} coordinates, expected {}", v.len(), self.dim),
            ));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain(op, format!("{label} has non-finite coordinates")));
        }
        Ok(())
    }

    pub fn density(&self, theta: &[f64], x: &[f64]) -> Result<f64> {
        self.check_point("GaussianLocation::density", "location", theta)?;
        self.check_point("GaussianLocation::density", "point", x)?;
        let sq: f64 = theta.iter().zip(x).map(|(t, y)| (y - t) * (y - t)).sum();
        let norm = (2.0 * std::f64::consts::PI).powi(self.dim as i32 / 2)
            * if self.dim % 2 == 1 { (2.0 * std::f64::consts::PI).sqrt() } else { 1.0 };
        Ok((-0.5 * sq).exp() / norm)
    }

    /// Fisher information: the identity matrix, returned row-major.
    pub fn fisher_info(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim * self.dim];
        for i in 0..self.dim {
            m[i * self.dim + i] = 1.0;
        }
        m
    }

    pub fn sample(&self, theta: &[f64], n: usize, rng: &mut ChaCha12Rng) -> Result<Vec<Vec<f64>>> {
        self.check_point("GaussianLocation::sample", "location", theta)?;
        Ok((0..n)
            .map(|_| theta.iter().map(|t| t + sample_standard_normal(rng)).collect())
            .collect())
    }
}
