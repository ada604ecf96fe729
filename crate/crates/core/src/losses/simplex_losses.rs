//! Losses on the probability simplex for the multinomial model.
//!
//! Vectors on the full simplex have d nonnegative coordinates summing to 1;
//! the loss adapters work in the standard reparametrization by the first
//! d − 1 coordinates (the last is implied), matching the free parameters of
//! the multinomial family.

use crate::error::{Error, Result};
use crate::losses::{expect_dim, Domain, Loss};

/// Margin keeping reparametrized points strictly inside the simplex.
const SIMPLEX_MARGIN: f64 = 1e-9;

fn check_simplex(op: &'static str, p: &[f64]) -> Result<()> {
    if p.len() < 2 {
        return Err(Error::dimension(op, "need at least two categories"));
    }
    if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::domain(op, "coordinates must be nonnegative and finite"));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::domain(op, format!("coordinates sum to {sum}, not 1")));
    }
    Ok(())
}

/// 2-Wasserstein squared distance between multinomial distributions under the
/// 0/1 ground metric on categories:
///
/// ```text
/// W₂²(p, ϑ) = 1 − Σᵢ min(pᵢ, ϑᵢ),
/// ```
///
/// which coincides with the total-variation distance (every power of the
/// discrete metric is the metric itself, so optimal transport only charges
/// the mass that must move). Inputs are full simplex vectors.
pub fn w2sq_multinomial(p: &[f64], theta: &[f64]) -> Result<f64> {
    check_simplex("w2sq_multinomial", p)?;
    check_simplex("w2sq_multinomial", theta)?;
    if p.len() != theta.len() {
        return Err(Error::dimension(
            "w2sq_multinomial",
            format!("lengths {} vs {}", p.len(), theta.len()),
        ));
    }
    let overlap: f64 = p.iter().zip(theta).map(|(a, b)| a.min(*b)).sum();
    Ok(1.0 - overlap)
}

/// ℓ¹ distance between reparametrized simplex points (first d − 1
/// coordinates only): Σᵢ |aᵢ − bᵢ|.
pub fn l1_reparam(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::dimension(
            "l1_reparam",
            format!("lengths {} vs {}", a.len(), b.len()),
        ));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::domain("l1_reparam", "non-finite coordinates"));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())
}

fn extend_to_simplex(op: &'static str, t: &[f64]) -> Result<Vec<f64>> {
    let head: f64 = t.iter().sum();
    let mut full = t.to_vec();
    full.push(1.0 - head);
    if full.iter().any(|&x| x < -1e-12) || head > 1.0 + 1e-12 {
        return Err(Error::domain(
            op,
            "reparametrized point leaves the probability simplex",
        ));
    }
    for x in &mut full {
        *x = x.max(0.0);
    }
    Ok(full)
}

/// 0/1-cost transport loss on the multinomial family, over the first d − 1
/// simplex coordinates.
#[derive(Clone, Copy, Debug)]
pub struct W2SqMultinomial {
    /// Number of free coordinates (categories minus one).
    pub dim: usize,
}

impl W2SqMultinomial {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::dimension("W2SqMultinomial::new", "dimension must be positive"));
        }
        Ok(W2SqMultinomial { dim })
    }
}

impl Loss for W2SqMultinomial {
    fn name(&self) -> &'static str {
        "w2sq-multinomial"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn domain(&self) -> Domain {
        Domain::Simplex {
            dim: self.dim + 1,
            margin: SIMPLEX_MARGIN,
        }
    }

    fn eval(&self, t: &[f64], theta: &[f64]) -> Result<f64> {
        expect_dim("w2sq-multinomial", self.dim, t)?;
        expect_dim("w2sq-multinomial", self.dim, theta)?;
        let p = extend_to_simplex("w2sq-multinomial", t)?;
        let q = extend_to_simplex("w2sq-multinomial", theta)?;
        w2sq_multinomial(&p, &q)
    }

    fn local_order(&self) -> f64 {
        1.0
    }

    fn eval_batch_sum(&self, t: &[f64], draws: &[f64]) -> Result<f64> {
        expect_dim("w2sq-multinomial", self.dim, t)?;
        let p = extend_to_simplex("w2sq-multinomial", t)?;
        let mut acc = 0.0;
        for row in draws.chunks_exact(self.dim) {
            let mut overlap = 0.0;
            let mut tail = 1.0;
            for (a, b) in p.iter().zip(row) {
                overlap += a.min(*b);
                tail -= b;
            }
            acc += 1.0 - (overlap + p[self.dim].min(tail.max(0.0)));
        }
        Ok(acc)
    }
}

/// Coordinatewise absolute-error loss on the reparametrized simplex. Its
/// Bayes estimator is the vector of marginal posterior medians.
#[derive(Clone, Copy, Debug)]
pub struct L1Reparam {
    /// Number of free coordinates (categories minus one).
    pub dim: usize,
}

impl L1Reparam {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::dimension("L1Reparam::new", "dimension must be positive"));
        }
        Ok(L1Reparam { dim })
    }
}

impl Loss for L1Reparam {
    fn name(&self) -> &'static str {
        "l1-reparam"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn domain(&self) -> Domain {
        Domain::Simplex {
            dim: self.dim + 1,
            margin: SIMPLEX_MARGIN,
        }
    }

    fn eval(&self, t: &[f64], theta: &[f64]) -> Result<f64> {
        expect_dim("l1-reparam", self.dim, t)?;
        expect_dim("l1-reparam", self.dim, theta)?;
        l1_reparam(t, theta)
    }

    fn local_order(&self) -> f64 {
        1.0
    }

    fn local_limit(&self, t: &[f64], h: &[f64]) -> Option<f64> {
        l1_reparam(t, h).ok()
    }

    fn eval_batch_sum(&self, t: &[f64], draws: &[f64]) -> Result<f64> {
        expect_dim("l1-reparam", self.dim, t)?;
        // Hot path for Monte Carlo risk: unrolled two-coordinate case.
        let mut acc = 0.0;
        if self.dim == 2 {
            let (t0, t1) = (t[0], t[1]);
            for row in draws.chunks_exact(2) {
                acc += (t0 - row[0]).abs() + (t1 - row[1]).abs();
            }
        } else {
            for row in draws.chunks_exact(self.dim) {
                acc += t.iter().zip(row).map(|(a, b)| (a - b).abs()).sum::<f64>();
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_identity_pins() {
        let v = w2sq_multinomial(&[0.5, 0.3, 0.2], &[0.2, 0.5, 0.3]).unwrap();
        // Overlap = 0.2 + 0.3 + 0.2 = 0.7.
        assert!((v - 0.3).abs() < 1e-15);
        assert_eq!(w2sq_multinomial(&[0.4, 0.6], &[0.4, 0.6]).unwrap(), 0.0);
        // Disjoint supports move all mass.
        let far = w2sq_multinomial(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!(far, 1.0);
    }

    #[test]
    fn equals_total_variation_brute_force() {
        // TV = ½ Σ|pᵢ−ϑᵢ| equals 1 − Σ min(pᵢ,ϑᵢ) on the simplex.
        let cases: [(Vec<f64>, Vec<f64>); 2] = [
            (vec![0.5, 0.3, 0.2], vec![0.1, 0.1, 0.8]),
            (vec![0.25, 0.25, 0.25, 0.25], vec![0.4, 0.3, 0.2, 0.1]),
        ];
        for (p, q) in &cases {
            let tv: f64 = 0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>();
            let got = w2sq_multinomial(p, q).unwrap();
            assert!((got - tv).abs() < 1e-15, "{got} vs {tv}");
        }
    }

    #[test]
    fn reparametrized_adapter_matches_full_vectors() {
        let loss = W2SqMultinomial::new(2).unwrap();
        let got = loss.eval(&[0.5, 0.3], &[0.2, 0.5]).unwrap();
        let full = w2sq_multinomial(&[0.5, 0.3, 0.2], &[0.2, 0.5, 0.3]).unwrap();
        assert!((got - full).abs() < 1e-15);

        let batch = loss
            .eval_batch_sum(&[0.5, 0.3], &[0.2, 0.5, 0.1, 0.1])
            .unwrap();
        let expect = full + w2sq_multinomial(&[0.5, 0.3, 0.2], &[0.1, 0.1, 0.8]).unwrap();
        assert!((batch - expect).abs() < 1e-15);
    }

    #[test]
    fn l1_reparam_basics() {
        assert!((l1_reparam(&[0.3, 0.4], &[0.1, 0.5]).unwrap() - 0.3).abs() < 1e-15);
        let loss = L1Reparam::new(2).unwrap();
        assert_eq!(
            loss.eval(&[0.3, 0.4], &[0.1, 0.5]).unwrap(),
            l1_reparam(&[0.3, 0.4], &[0.1, 0.5]).unwrap()
        );
        let batch = loss
            .eval_batch_sum(&[0.3, 0.3], &[0.1, 0.5, 0.2, 0.2])
            .unwrap();
        assert!((batch - (0.4 + 0.2)).abs() < 1e-15);
        // Unrolled path agrees with the generic one.
        let loss3 = L1Reparam::new(3).unwrap();
        let b3 = loss3
            .eval_batch_sum(&[0.2, 0.3, 0.1], &[0.1, 0.1, 0.1, 0.3, 0.2, 0.4])
            .unwrap();
        assert!((b3 - (0.1 + 0.2 + 0.0 + 0.1 + 0.1 + 0.3)).abs() < 1e-15);
    }

    #[test]
    fn l1_local_limit_is_itself() {
        let loss = L1Reparam::new(2).unwrap();
        let lim = loss.local_limit(&[0.1, -0.2], &[-0.3, 0.1]).unwrap();
        assert!((lim - 0.7).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(w2sq_multinomial(&[0.5, 0.6], &[0.5, 0.5]).is_err(), "sum > 1");
        assert!(w2sq_multinomial(&[-0.1, 1.1], &[0.5, 0.5]).is_err(), "negative");
        assert!(w2sq_multinomial(&[1.0], &[1.0]).is_err(), "too short");
        assert!(w2sq_multinomial(&[0.5, 0.5], &[0.2, 0.3, 0.5]).is_err(), "mismatch");
        assert!(l1_reparam(&[0.1], &[0.1, 0.2]).is_err());
        let loss = W2SqMultinomial::new(2).unwrap();
        assert!(loss.eval(&[0.9, 0.3], &[0.2, 0.2]).is_err(), "leaves simplex");
    }
}
