//! Symmetric 2×2 matrix algebra.
//!
//! Everything the entropic-transport formulas need for bivariate Gaussians:
//! traces, determinants, inverses, congruences, and the closed-form principal
//! square root of an SPD 2×2 matrix,
//!
//! ```text
//! √M = (M + √det(M)·I) / √(tr(M) + 2·√det(M)),
//! ```
//!
//! which is exact up to rounding (no iteration involved).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric 2×2 matrix stored by its upper triangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymMat2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SymMat2 {
    pub fn new(xx: f64, xy: f64, yy: f64) -> Self {
        SymMat2 { xx, xy, yy }
    }

    pub fn identity() -> Self {
        SymMat2 { xx: 1.0, xy: 0.0, yy: 1.0 }
    }

    pub fn diag(a: f64, b: f64) -> Self {
        SymMat2 { xx: a, xy: 0.0, yy: b }
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    /// Symmetric positive-definite test (via the leading-minor criterion).
    pub fn is_spd(&self) -> bool {
        self.xx > 0.0 && self.det() > 0.0 && self.xx.is_finite() && self.xy.is_finite() && self.yy.is_finite()
    }

    pub fn scale(&self, k: f64) -> Self {
        SymMat2 { xx: k * self.xx, xy: k * self.xy, yy: k * self.yy }
    }

    pub fn add(&self, other: &SymMat2) -> Self {
        SymMat2 {
            xx: self.xx + other.xx,
            xy: self.xy + other.xy,
            yy: self.yy + other.yy,
        }
    }

    pub fn inverse(&self) -> Result<SymMat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return Err(Error::domain("SymMat2::inverse", "singular matrix"));
        }
        Ok(SymMat2 { xx: self.yy / d, xy: -self.xy / d, yy: self.xx / d })
    }

    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.xx * v[0] + self.xy * v[1],
            self.xy * v[0] + self.yy * v[1],
        ]
    }

    /// Quadratic form vᵀ M v.
    pub fn quad_form(&self, v: [f64; 2]) -> f64 {
        self.xx * v[0] * v[0] + 2.0 * self.xy * v[0] * v[1] + self.yy * v[1] * v[1]
    }
}

/// tr(A·B) for symmetric A, B.
pub fn product_trace(a: &SymMat2, b: &SymMat2) -> f64 {
    a.xx * b.xx + 2.0 * a.xy * b.xy + a.yy * b.yy
}

/// Congruence R·M·R for symmetric R and M (the result is symmetric).
pub fn sandwich(r: &SymMat2, m: &SymMat2) -> SymMat2 {
    // First P = M·R, then R·P; the (1,2)/(2,1) entries agree analytically,
    // so compute one of them.
    let p = [
        [m.xx * r.xx + m.xy * r.xy, m.xx * r.xy + m.xy * r.yy],
        [m.xy * r.xx + m.yy * r.xy, m.xy * r.xy + m.yy * r.yy],
    ];
    SymMat2 {
        xx: r.xx * p[0][0] + r.xy * p[1][0],
        xy: r.xx * p[0][1] + r.xy * p[1][1],
        yy: r.xy * p[0][1] + r.yy * p[1][1],
    }
}

/// Principal square root of a symmetric positive-definite 2×2 matrix.
pub fn spd2_sqrt(m: &SymMat2) -> Result<SymMat2> {
    if !m.is_spd() {
        return Err(Error::domain(
            "spd2_sqrt",
            format!("matrix [[{}, {}], [{}, {}]] is not SPD", m.xx, m.xy, m.xy, m.yy),
        ));
    }
    let s = m.det().sqrt();
    let denom = (m.trace() + 2.0 * s).sqrt();
    Ok(SymMat2 {
        xx: (m.xx + s) / denom,
        xy: m.xy / denom,
        yy: (m.yy + s) / denom,
    })
}
