//! Parameter derivatives of squared Wasserstein distance via dual potentials.
//!
//! For a one-parameter family {P_t} on the line, the map t ↦ W₂²(P_t, P_ϑ)
//! is differentiable; its derivative is the integral of the Kantorovich dual
//! potential against the parameter derivative of the density,
//!
//! ```text
//!   d/dt W₂²(P_t, P_ϑ) |_{t=t₀}  =  ∫ φ_{t₀}^ϑ(x) · ∂_t p_t(x)|_{t₀} dx,
//! ```
//!
//! and the second derivative splits into a transport-displacement part and a
//! density-weighted CDF-derivative part,
//!
//! ```text
//!   d²/dt² W₂² = 2 ( ∫ (T − x) ∂²_t F dx  +  ∫ (∂_x T) (∂_t F)² / p dx ).
//! ```
//!
//! Both are evaluated by adaptive quadrature; [`pareto_dual_model`] supplies
//! the Pareto shape family where every ingredient has an elementary formula,
//! so the quadrature values can be checked against the closed-form loss.

use crate::error::{Error, Result};
use crate::families::{ParetoShape, UnivariateFamily};
use crate::special::quad::integrate_half_line;

/// Absolute quadrature tolerance for the derivative integrals.
const QUAD_TOL: f64 = 1e-10;

/// A one-parameter family bundled with the analytic ingredients of the dual
/// derivative formulas: the Kantorovich potential φ_t^ϑ, the optimal
/// transport map T_t^ϑ, and the parameter derivatives of density and CDF.
///
/// The additive normalization of φ is not determined by the theory (only
/// ∂_x φ is); `phi_shift` exposes the free constant so the invariance of the
/// derivative formulas under it can be verified numerically.
pub struct DualPotentialModel {
    pub family: Box<dyn UnivariateFamily + Send + Sync>,
    /// Left edge of the common support; integrals run over (support_lo, ∞).
    pub support_lo: f64,
    /// Additive constant of the dual potential.
    pub phi_shift: f64,
    phi: fn(f64, f64, f64) -> f64,
    transport: fn(f64, f64, f64) -> f64,
    dtransport_dx: fn(f64, f64, f64) -> f64,
    dp_dt: fn(f64, f64) -> f64,
    df_dt: fn(f64, f64) -> f64,
    d2f_dt2: fn(f64, f64) -> f64,
}

impl DualPotentialModel {
    pub fn with_phi_shift(mut self, c: f64) -> Self {
        self.phi_shift = c;
        self
    }

    fn check_x(&self, op: &'static str, x: f64) -> Result<()> {
        if x.is_finite() && x > self.support_lo {
            Ok(())
        } else {
            Err(Error::domain(
                op,
                format!("point {x} outside the support ({}, inf)", self.support_lo),
            ))
        }
    }

    /// Dual potential φ_t^ϑ(x), including the additive constant.
    pub fn phi(&self, t: f64, theta: f64, x: f64) -> Result<f64> {
        self.family.check_theta("DualPotentialModel::phi", t)?;
        self.family.check_theta("DualPotentialModel::phi", theta)?;
        self.check_x("DualPotentialModel::phi", x)?;
        Ok((self.phi)(t, theta, x) + self.phi_shift)
    }

    /// Optimal transport map T_t^ϑ(x) pushing P_t forward to P_ϑ.
    pub fn transport(&self, t: f64, theta: f64, x: f64) -> Result<f64> {
        self.family.check_theta("DualPotentialModel::transport", t)?;
        self.family.check_theta("DualPotentialModel::transport", theta)?;
        self.check_x("DualPotentialModel::transport", x)?;
        Ok((self.transport)(t, theta, x))
    }

    /// Space derivative ∂_x T_t^ϑ(x).
    pub fn dtransport_dx(&self, t: f64, theta: f64, x: f64) -> Result<f64> {
        self.family.check_theta("DualPotentialModel::dtransport_dx", t)?;
        self.family.check_theta("DualPotentialModel::dtransport_dx", theta)?;
        self.check_x("DualPotentialModel::dtransport_dx", x)?;
        Ok((self.dtransport_dx)(t, theta, x))
    }

    /// Parameter derivative of the density, ∂_t p_t(x).
    pub fn dp_dt(&self, t: f64, x: f64) -> Result<f64> {
        self.family.check_theta("DualPotentialModel::dp_dt", t)?;
        self.check_x("DualPotentialModel::dp_dt", x)?;
        Ok((self.dp_dt)(t, x))
    }

    /// Parameter derivative of the CDF, ∂_t F_t(x).
    pub fn df_dt(&self, t: f64, x: f64) -> Result<f64> {
        self.family.check_theta("DualPotentialModel::df_dt", t)?;
        self.check_x("DualPotentialModel::df_dt", x)?;
        Ok((self.df_dt)(t, x))
    }

    /// Second parameter derivative of the CDF, ∂²_t F_t(x).
    pub fn d2f_dt2(&self, t: f64, x: f64) -> Result<f64> {
        self.family.check_theta("DualPotentialModel::d2f_dt2", t)?;
        self.check_x("DualPotentialModel::d2f_dt2", x)?;
        Ok((self.d2f_dt2)(t, x))
    }
}

/// d/dt W₂²(P_t, P_ϑ) at t = t₀, via ∫ φ_{t₀}^ϑ · ∂_t p_{t₀} dx.
///
/// The value is invariant under the potential's additive constant because
/// ∫ ∂_t p dx = 0; the quadrature preserves this to roundoff.
pub fn w2_gradient_dual(model: &DualPotentialModel, t0: f64, theta: f64) -> Result<f64> {
    model.family.check_theta("w2_gradient_dual", t0)?;
    model.family.check_theta("w2_gradient_dual", theta)?;
    let phi = model.phi;
    let dp = model.dp_dt;
    let shift = model.phi_shift;
    integrate_half_line(
        |x| (phi(t0, theta, x) + shift) * dp(t0, x),
        model.support_lo,
        QUAD_TOL,
    )
    .map_err(|e| Error::numerics("w2_gradient_dual", e))
}

/// d²/dt² W₂²(P_t, P_ϑ) at t = t₀, via
/// 2(∫ (T − x) ∂²_t F dx + ∫ (∂_x T)(∂_t F)²/p dx).
pub fn w2_hessian_dual(model: &DualPotentialModel, t0: f64, theta: f64) -> Result<f64> {
    model.family.check_theta("w2_hessian_dual", t0)?;
    model.family.check_theta("w2_hessian_dual", theta)?;
    let transport = model.transport;
    let dtdx = model.dtransport_dx;
    let df = model.df_dt;
    let d2f = model.d2f_dt2;
    let lo = model.support_lo;
    let displacement = integrate_half_line(
        |x| (transport(t0, theta, x) - x) * d2f(t0, x),
        lo,
        QUAD_TOL,
    )
    .map_err(|e| Error::numerics("w2_hessian_dual", e))?;
    let family = &model.family;
    let weighted = integrate_half_line(
        |x| {
            let p = family.density(t0, x).unwrap_or(f64::NAN);
            let g = df(t0, x);
            dtdx(t0, theta, x) * g * g / p
        },
        lo,
        QUAD_TOL,
    )
    .map_err(|e| Error::numerics("w2_hessian_dual", e))?;
    Ok(2.0 * (displacement + weighted))
}

/// Absolute contribution of the region (cutoff, ∞) to the gradient integral.
///
/// The gradient integrand decays like x^{1−t₀} log x, so for moderately large
/// shapes the tail beyond any fixed cutoff is negligible; this quantifies it.
pub fn gradient_tail_contribution(
    model: &DualPotentialModel,
    t0: f64,
    theta: f64,
    cutoff: f64,
) -> Result<f64> {
    model.family.check_theta("gradient_tail_contribution", t0)?;
    model.family.check_theta("gradient_tail_contribution", theta)?;
    if !(cutoff > model.support_lo) {
        return Err(Error::domain(
            "gradient_tail_contribution",
            format!("cutoff {cutoff} must exceed the support edge"),
        ));
    }
    let phi = model.phi;
    let dp = model.dp_dt;
    let shift = model.phi_shift;
    integrate_half_line(
        |x| ((phi(t0, theta, x) + shift) * dp(t0, x)).abs(),
        cutoff,
        QUAD_TOL,
    )
    .map_err(|e| Error::numerics("gradient_tail_contribution", e))
}

/// The Pareto shape family (density t·x^{−t−1} on x > 1) with every
/// ingredient of the dual derivative formulas in elementary closed form:
///
/// * T_t^ϑ(x) = x^{t/ϑ},  ∂_x T = (t/ϑ) x^{t/ϑ−1}
/// * φ_t^ϑ(x) = x² − 1 + (2ϑ/(t+ϑ))(1 − x^{1+t/ϑ})  (+ free constant)
/// * ∂_t p_t(x) = (1 − t·log x)/x^{t+1}
/// * ∂_t F_t(x) = log(x)/x^t,  ∂²_t F_t(x) = −log²(x)/x^t
pub fn pareto_dual_model() -> DualPotentialModel {
    DualPotentialModel {
        family: Box::new(ParetoShape),
        support_lo: 1.0,
        phi_shift: 0.0,
        phi: |t, theta, x| {
            x * x - 1.0 + (2.0 * theta / (t + theta)) * (1.0 - x.powf(1.0 + t / theta))
        },
        transport: |t, theta, x| x.powf(t / theta),
        dtransport_dx: |t, theta, x| (t / theta) * x.powf(t / theta - 1.0),
        dp_dt: |t, x| (1.0 - t * x.ln()) * x.powf(-t - 1.0),
        df_dt: |t, x| x.ln() * x.powf(-t),
        d2f_dt2: |t, x| {
            let l = x.ln();
            -l * l * x.powf(-t)
        },
    }
}
