//! Standard normal density, distribution function, and quantile.
//!
//! Φ is computed as ½·erfc(−x/√2) with a Maclaurin series for the central
//! range and a modified-Lentz continued fraction for the tails, so tail
//! probabilities keep full relative accuracy down to the underflow threshold.
//! The quantile uses a rational initial guess polished by Newton steps on Φ.

use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const FRAC_2_SQRT_PI: f64 = 1.128_379_167_095_512_6; // 2/√π
const MAX_ITER: usize = 300;

/// erf by Maclaurin series; accurate for |x| ≲ 2.5.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for k in 1..MAX_ITER {
        let k = k as f64;
        term *= -x2 / k;
        let contrib = term / (2.0 * k + 1.0);
        sum += contrib;
        if contrib.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

/// erfc(x)·√π·exp(x²) for x > 0 via the continued fraction
/// 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ⋯)))), modified Lentz.
fn erfc_cf_scaled(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let b = x;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for k in 1..=MAX_ITER {
        let a = 0.5 * k as f64;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        if c == 0.0 {
            c = TINY;
        }
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Complementary error function.
fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x <= 2.0 {
        1.0 - erf_series(x)
    } else {
        // erfc(x) = e^(−x²)/√π · CF
        erfc_cf_scaled(x) * (-x * x).exp() / std::f64::consts::PI.sqrt()
    }
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal distribution function Φ(x).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile Φ⁻¹(p) for p ∈ (0, 1).
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("normal_quantile", format!("requires p in (0,1), got {p}")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // Rational initial guess (classical Hastings approximation, ~4.5e-4
    // absolute), then Newton on Φ with the exact density as derivative.
    let q = p.min(1.0 - p);
    let t = (-2.0 * q.ln()).sqrt();
    let mut x = t - (2.515517 + t * (0.802853 + t * 0.010328))
        / (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308)));
    if p < 0.5 {
        x = -x;
    }
    for _ in 0..6 {
        let err = normal_cdf(x) - p;
        let step = err / normal_pdf(x);
        // Clamp to keep the iteration inside the well-conditioned region.
        let step = step.clamp(-1.0, 1.0);
        x -= step;
        if step.abs() < 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.0) - 0.8413447460685429).abs() < 1e-15);
        assert!((normal_cdf(2.0) - 0.9772498680518208).abs() < 1e-15);
        assert!((normal_cdf(0.3) - 0.6179114221889526).abs() < 1e-15);
        // Tail values keep relative accuracy through the continued fraction.
        let tail = normal_cdf(-5.0);
        assert!((tail - 2.866515718791939e-7).abs() < 1e-19 * 1e7 * tail.abs());
        let deep = normal_cdf(-8.0);
        assert!((deep / 6.220960574271784e-16 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetry_and_monotonicity() {
        let mut prev = 0.0;
        for i in 0..=160 {
            let x = -8.0 + 0.1 * i as f64;
            let p = normal_cdf(x);
            assert!((p + normal_cdf(-x) - 1.0).abs() < 1e-15, "symmetry at {x}");
            assert!(p >= prev, "monotone at {x}");
            prev = p;
        }
    }

    #[test]
    fn pdf_is_derivative_of_cdf() {
        let h = 1e-6;
        for &x in &[-3.0, -1.3, 0.0, 0.4, 2.2] {
            let fd = (normal_cdf(x + h) - normal_cdf(x - h)) / (2.0 * h);
            assert!((fd - normal_pdf(x)).abs() < 1e-9, "at {x}");
        }
    }

    #[test]
    fn quantile_reference_values() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        assert!((normal_quantile(0.975).unwrap() - 1.959963984540054).abs() < 1e-12);
        assert!((normal_quantile(0.8413447460685429).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_quantile_roundtrip() {
        // |Φ(Φ⁻¹(p)) − p| ≤ 1e-10 across the working range, approaching both
        // endpoints geometrically down to 1e-8.
        let mut q = 1e-8;
        while q <= 0.5 {
            for p in [q, 1.0 - q] {
                let x = normal_quantile(p).unwrap();
                let back = normal_cdf(x);
                assert!((back - p).abs() < 1e-10, "p = {p}: roundtrip {back}");
            }
            q *= 1.45;
        }
    }

    #[test]
    fn quantile_rejects_boundary() {
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
        assert!(normal_quantile(-0.2).is_err());
        assert!(normal_quantile(f64::NAN).is_err());
    }
}
