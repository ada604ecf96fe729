//! Exact conjugate posteriors for the two Bayes models: Gamma for the
//! exponential rate and Dirichlet for multinomial probabilities.
//!
//! Posteriors are stored by their exact parameters — samplers, densities,
//! and quantiles are derived views — so any estimator error downstream is
//! attributable to the risk Monte Carlo alone, never to an approximate
//! posterior representation.

use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::special::beta_fn::beta_quantile;
use crate::special::gamma_fn::{gamma_quantile, ln_gamma, reg_lower_gamma};
use crate::special::normal::normal_pdf;
use crate::special::quad::integrate;
use crate::special::samplers::{sample_dirichlet, sample_gamma};

/// Exact conjugate posterior distribution.
#[derive(Clone, Debug, PartialEq)]
pub enum Posterior {
    /// Gamma(shape, rate) over a positive scalar parameter.
    Gamma { shape: f64, rate: f64 },
    /// Dirichlet(α) over the probability simplex; vector interfaces use the
    /// first d−1 coordinates (the last is implied).
    Dirichlet { alpha: Vec<f64> },
}

impl Posterior {
    fn validate(&self) -> Result<()> {
        match self {
            Posterior::Gamma { shape, rate } => {
                if !(shape.is_finite() && *shape > 0.0 && rate.is_finite() && *rate > 0.0) {
                    return Err(Error::domain(
                        "Posterior::Gamma",
                        format!("shape {shape} and rate {rate} must be positive"),
                    ));
                }
            }
            Posterior::Dirichlet { alpha } => {
                if alpha.len() < 2 {
                    return Err(Error::dimension(
                        "Posterior::Dirichlet",
                        "need at least two categories",
                    ));
                }
                if alpha.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
                    return Err(Error::domain(
                        "Posterior::Dirichlet",
                        "concentrations must be positive",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Dimension of parameter vectors this posterior produces: 1 for Gamma,
    /// d−1 free simplex coordinates for Dirichlet over d categories.
    pub fn dim(&self) -> usize {
        match self {
            Posterior::Gamma { .. } => 1,
            Posterior::Dirichlet { alpha } => alpha.len() - 1,
        }
    }

    /// Posterior mean in the same coordinates as [`Posterior::sample`].
    pub fn mean(&self) -> Vec<f64> {
        match self {
            Posterior::Gamma { shape, rate } => vec![shape / rate],
            Posterior::Dirichlet { alpha } => {
                let total: f64 = alpha.iter().sum();
                alpha[..alpha.len() - 1].iter().map(|a| a / total).collect()
            }
        }
    }

    /// Draw `s` parameter vectors, flattened row-major into a vector of
    /// length `s * self.dim()`.
    pub fn sample(&self, s: usize, rng: &mut ChaCha12Rng) -> Result<Vec<f64>> {
        self.validate()?;
        if s == 0 {
            return Err(Error::domain("Posterior::sample", "need at least one draw"));
        }
        let dim = self.dim();
        let mut out = Vec::with_capacity(s * dim);
        match self {
            Posterior::Gamma { shape, rate } => {
                for _ in 0..s {
                    out.push(sample_gamma(*shape, *rate, rng)?);
                }
            }
            Posterior::Dirichlet { alpha } => {
                for _ in 0..s {
                    let full = sample_dirichlet(alpha, rng)?;
                    out.extend_from_slice(&full[..dim]);
                }
            }
        }
        Ok(out)
    }

    /// Density of a one-dimensional posterior at `theta`.
    pub fn density(&self, theta: f64) -> Result<f64> {
        self.validate()?;
        match self {
            Posterior::Gamma { shape, rate } => {
                if theta <= 0.0 {
                    return Ok(0.0);
                }
                Ok((shape * rate.ln() + (shape - 1.0) * theta.ln() - rate * theta
                    - ln_gamma(*shape))
                    .exp())
            }
            Posterior::Dirichlet { .. } => Err(Error::domain(
                "Posterior::density",
                "only one-dimensional posteriors have a scalar density",
            )),
        }
    }

    /// Quantile of the k-th marginal. Gamma has the single marginal k = 0;
    /// the Dirichlet marginal of full-simplex coordinate k is
    /// Beta(α_k, Σ_{j≠k} α_j) by the aggregation property.
    pub fn marginal_quantile(&self, k: usize, u: f64) -> Result<f64> {
        self.validate()?;
        match self {
            Posterior::Gamma { shape, rate } => {
                if k != 0 {
                    return Err(Error::dimension(
                        "Posterior::marginal_quantile",
                        format!("scalar posterior has only marginal 0, got {k}"),
                    ));
                }
                gamma_quantile(*shape, *rate, u)
            }
            Posterior::Dirichlet { alpha } => {
                if k >= alpha.len() {
                    return Err(Error::dimension(
                        "Posterior::marginal_quantile",
                        format!("marginal {k} of a {}-category Dirichlet", alpha.len()),
                    ));
                }
                let total: f64 = alpha.iter().sum();
                beta_quantile(alpha[k], total - alpha[k], u)
            }
        }
    }

    /// Posterior mass outside the interval [center − radius, center + radius]
    /// for a one-dimensional posterior, computed from the exact CDF.
    pub fn tail_mass_outside_interval(&self, center: f64, radius: f64) -> Result<f64> {
        self.validate()?;
        if !(radius > 0.0) || !center.is_finite() {
            return Err(Error::domain(
                "Posterior::tail_mass_outside_interval",
                "radius must be positive and center finite",
            ));
        }
        match self {
            Posterior::Gamma { shape, rate } => {
                let cdf = |x: f64| -> Result<f64> {
                    if x <= 0.0 {
                        Ok(0.0)
                    } else {
                        reg_lower_gamma(*shape, rate * x)
                    }
                };
                let inside = cdf(center + radius)? - cdf(center - radius)?;
                Ok((1.0 - inside).clamp(0.0, 1.0))
            }
            Posterior::Dirichlet { .. } => Err(Error::domain(
                "Posterior::tail_mass_outside_interval",
                "only one-dimensional posteriors are supported",
            )),
        }
    }
}

/// Posterior for an exponential rate under a Gamma(a, b) prior:
/// Gamma(a + n, b + Σᵢ xᵢ).
pub fn update_exp_gamma(a: f64, b: f64, data: &[f64]) -> Result<Posterior> {
    if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
        return Err(Error::domain(
            "update_exp_gamma",
            format!("prior shape {a} and rate {b} must be positive"),
        ));
    }
    if data.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::domain(
            "update_exp_gamma",
            "observations must be positive reals",
        ));
    }
    let posterior = Posterior::Gamma {
        shape: a + data.len() as f64,
        rate: b + data.iter().sum::<f64>(),
    };
    posterior.validate()?;
    Ok(posterior)
}

/// Posterior for multinomial probabilities under a Dirichlet(α) prior, from
/// one-hot observation vectors: Dirichlet(α + Σᵢ xᵢ).
pub fn update_mult_dirichlet(alpha: &[f64], data: &[Vec<f64>]) -> Result<Posterior> {
    let mut counts = vec![0u64; alpha.len()];
    for row in data {
        if row.len() != alpha.len() {
            return Err(Error::dimension(
                "update_mult_dirichlet",
                format!("observation length {} vs {} categories", row.len(), alpha.len()),
            ));
        }
        let mut hot = None;
        for (j, &v) in row.iter().enumerate() {
            if v == 1.0 {
                if hot.replace(j).is_some() {
                    hot = None;
                    break;
                }
            } else if v != 0.0 {
                hot = None;
                break;
            }
        }
        let Some(j) = hot else {
            return Err(Error::domain(
                "update_mult_dirichlet",
                "observations must be one-hot unit vectors",
            ));
        };
        counts[j] += 1;
    }
    update_mult_dirichlet_counts(alpha, &counts)
}

/// Posterior for multinomial probabilities from category counts (the
/// sufficient statistic of the one-hot data): Dirichlet(α + counts).
pub fn update_mult_dirichlet_counts(alpha: &[f64], counts: &[u64]) -> Result<Posterior> {
    if alpha.len() != counts.len() {
        return Err(Error::dimension(
            "update_mult_dirichlet_counts",
            format!("{} concentrations vs {} counts", alpha.len(), counts.len()),
        ));
    }
    let posterior = Posterior::Dirichlet {
        alpha: alpha
            .iter()
            .zip(counts)
            .map(|(&a, &c)| a + c as f64)
            .collect(),
    };
    posterior.validate()?;
    Ok(posterior)
}

/// Total-variation distance ½∫|p − φ| between a one-dimensional posterior
/// density p and the N(center, var) density, by adaptive quadrature over the
/// union of the ±12-standard-deviation intervals of the two densities.
pub fn posterior_tv_to_gaussian(post: &Posterior, center: f64, var: f64) -> Result<f64> {
    post.validate()?;
    if post.dim() != 1 {
        return Err(Error::domain(
            "posterior_tv_to_gaussian",
            "only one-dimensional posteriors are supported",
        ));
    }
    if !(var > 0.0 && var.is_finite() && center.is_finite()) {
        return Err(Error::domain(
            "posterior_tv_to_gaussian",
            "need a finite center and positive variance",
        ));
    }
    let (post_mean, post_sd) = match post {
        Posterior::Gamma { shape, rate } => (shape / rate, shape.sqrt() / rate),
        Posterior::Dirichlet { .. } => unreachable!("dim() == 1 excludes Dirichlet"),
    };
    let sd = var.sqrt();
    let lo = (post_mean - 12.0 * post_sd).min(center - 12.0 * sd);
    let hi = (post_mean + 12.0 * post_sd).max(center + 12.0 * sd);
    let diff = |x: f64| {
        let p = post.density(x).unwrap_or(0.0);
        let q = normal_pdf((x - center) / sd) / sd;
        (p - q).abs()
    };
    let tv = 0.5 * integrate(diff, lo, hi, 1e-8)?;
    Ok(tv.clamp(0.0, 1.0))
}
