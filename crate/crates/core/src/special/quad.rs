//! Adaptive Gauss–Kronrod quadrature (7-point Gauss / 15-point Kronrod).
//!
//! The integrator keeps a worst-first queue of subintervals and bisects the
//! one with the largest error estimate until the summed estimate drops below
//! the requested absolute tolerance. The error estimate on each subinterval
//! is the difference between the embedded 7-point Gauss value and the
//! 15-point Kronrod value, which is conservative for smooth integrands and
//! drives refinement toward integrable endpoint singularities.
//!
//! Failure to converge (tolerance unreachable within the interval budget, or
//! a non-finite integrand value) surfaces as [`Error::Numerics`]; results are
//! never silently degraded.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// 15-point Kronrod abscissae on [0, 1] half-interval (symmetric about 0).
/// Even indices are also the 7-point Gauss abscissae.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// 7-point Gauss weights matching the odd-indexed entries of `XGK`
/// (index 1, 3, 5) plus the center node.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_INTERVALS: usize = 30_000;

/// Result of one Gauss–Kronrod pass over a single interval.
#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<Panel> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = WGK[7] * f(c);
    let mut gauss = WG[3] * f(c);
    for i in 0..7 {
        let lo = f(c - h * XGK[i]);
        let hi = f(c + h * XGK[i]);
        kronrod += WGK[i] * (lo + hi);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (lo + hi);
        }
    }
    let value = kronrod * h;
    let error = ((kronrod - gauss) * h).abs();
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::numerics(
            "integrate",
            format!("non-finite integrand on [{a}, {b}]"),
        ));
    }
    Ok(Panel { a, b, value, error })
}

/// Integrate `f` over the finite interval `[a, b]` to absolute tolerance
/// `abs_tol`. Errors if the tolerance cannot be certified.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || !(a < b) {
        return Err(Error::domain(
            "integrate",
            format!("invalid interval [{a}, {b}]"),
        ));
    }
    if !(abs_tol > 0.0) {
        return Err(Error::domain("integrate", "tolerance must be positive"));
    }
    let f: &dyn Fn(f64) -> f64 = &f;

    let mut heap = BinaryHeap::new();
    // Contributions from intervals too narrow to bisect further.
    let (mut frozen_value, mut frozen_error) = (0.0_f64, 0.0_f64);
    let mut heap_error;

    let first = gk15(f, a, b)?;
    heap_error = first.error;
    heap.push(first);
    let mut n_intervals = 1usize;

    while heap_error + frozen_error > abs_tol {
        let Some(worst) = heap.pop() else { break };
        heap_error -= worst.error;
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // Interval at the floating-point floor: keep its estimate as-is.
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        if n_intervals >= MAX_INTERVALS {
            return Err(Error::numerics(
                "integrate",
                format!(
                    "tolerance {abs_tol:.3e} not reached after {MAX_INTERVALS} \
                     subintervals (error estimate {:.3e})",
                    heap_error + worst.error + frozen_error
                ),
            ));
        }
        let left = gk15(f, worst.a, mid)?;
        let right = gk15(f, mid, worst.b)?;
        heap_error += left.error + right.error;
        heap.push(left);
        heap.push(right);
        n_intervals += 1;
    }

    if heap_error + frozen_error > abs_tol {
        return Err(Error::numerics(
            "integrate",
            format!(
                "tolerance {abs_tol:.3e} unreachable: floor error {:.3e}",
                heap_error + frozen_error
            ),
        ));
    }
    Ok(frozen_value + heap.iter().map(|p| p.value).sum::<f64>())
}

/// Integrate `f` over `[a, ∞)` to absolute tolerance `abs_tol`.
///
/// Uses the rational compactification x = a + (1−v)/v, v ∈ (0, 1) — the map
/// x = a + u/(1−u) traversed from the far end, so that the deep tail lands
/// near v = 0 where f64 resolution is finest (x beyond 1e16 is representable,
/// which matters for slowly decaying integrands).
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, a: f64, abs_tol: f64) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::domain("integrate_half_line", "lower limit must be finite"));
    }
    let mapped = move |v: f64| {
        if v <= 0.0 {
            return 0.0; // x = ∞ is never sampled by the open rule; guard anyway
        }
        let x = a + (1.0 - v) / v;
        f(x) / (v * v)
    };
    integrate(mapped, 0.0, 1.0, abs_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x * x, 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn sine_over_half_period() {
        let v = integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // ∫₀¹ x^(−1/2) dx = 2; refinement must pile up at the left endpoint.
        let v = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn half_line_slow_tail() {
        // ∫₁^∞ x^(−3/2) dx = 2.
        let v = integrate_half_line(|x| x.powf(-1.5), 1.0, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn half_line_exponential() {
        let v = integrate_half_line(|x| (-x).exp(), 0.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-11, "got {v}");
    }

    #[test]
    fn half_line_log_kernel() {
        // ∫₁^∞ log(x)·x^(−2) dx = 1, a shape close to the dual-potential
        // integrands used elsewhere in the crate.
        let v = integrate_half_line(|x| x.ln() / (x * x), 1.0, 1e-11).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn divergent_integral_errors() {
        let err = integrate(|x| 1.0 / x, 0.0, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::Numerics { .. }), "got {err:?}");
    }

    #[test]
    fn invalid_interval_errors() {
        assert!(integrate(|x| x, 1.0, 0.0, 1e-10).is_err());
        assert!(integrate(|x| x, 0.0, f64::INFINITY, 1e-10).is_err());
    }

    #[test]
    fn non_finite_integrand_errors() {
        let err = integrate(|_| f64::NAN, 0.0, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::Numerics { .. }));
    }
}
