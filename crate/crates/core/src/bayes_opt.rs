//! Bayes estimators by Monte Carlo risk minimization.
//!
//! A [`RiskProblem`] freezes a set of posterior draws and a loss; the risk
//! surface t ↦ (1/S)·Σ ℓ(t, ϑ_s) is then a deterministic function, so the
//! minimizer is reproducible bit for bit given the RNG stream that produced
//! the draws (common random numbers across all evaluated t).
//!
//! One-dimensional problems are bracketed on a grid and polished by
//! golden-section search; multivariate problems use Nelder–Mead with
//! projection onto the parameter domain after every candidate step.

use crate::error::{Error, Result};
use crate::losses::{Domain, Loss};

/// Tolerances and iteration caps for [`RiskProblem::minimize_risk`].
#[derive(Clone, Copy, Debug)]
pub struct OptimizerSettings {
    /// Final bracket width for golden-section search (1-D).
    pub golden_tol: f64,
    /// Simplex diameter at which Nelder–Mead stops (multivariate).
    pub simplex_diameter_tol: f64,
    /// Iteration cap for either optimizer.
    pub max_iter: usize,
    /// Bracketing grid resolution for the 1-D path.
    pub grid_points: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            golden_tol: 1e-9,
            simplex_diameter_tol: 1e-8,
            max_iter: 2000,
            grid_points: 64,
        }
    }
}

/// One evaluated candidate during risk minimization.
#[derive(Clone, Debug)]
pub struct TracePoint {
    pub point: Vec<f64>,
    pub risk: f64,
}

/// Result of a risk minimization.
#[derive(Clone, Debug)]
pub struct MinimizeResult {
    /// Lowest-risk point found; well-defined up to the optimizer tolerance.
    pub point: Vec<f64>,
    /// Monte Carlo risk at `point`; never exceeds the risk at any trace point.
    pub risk: f64,
    /// False when the iteration cap was hit before the width/diameter
    /// tolerance; the best point found so far is still returned.
    pub converged: bool,
    /// Number of risk-surface evaluations performed.
    pub evaluations: usize,
    /// Evaluated candidates, in evaluation order.
    pub trace: Vec<TracePoint>,
}

/// A posterior-risk minimization problem: fixed draws, a loss, its domain.
pub struct RiskProblem {
    loss: Box<dyn Loss>,
    /// Flat row-major S×d draw matrix.
    draws: Vec<f64>,
    s: usize,
    domain: Domain,
    clamped: usize,
    settings: OptimizerSettings,
}

impl RiskProblem {
    /// Freeze a draw set for a loss. Draws are projected into the loss's
    /// domain; the number of moved draws is kept as a diagnostic counter.
    pub fn new(loss: Box<dyn Loss>, mut draws: Vec<f64>) -> Result<Self> {
        let dim = loss.dim();
        if draws.is_empty() || draws.len() % dim != 0 {
            return Err(Error::dimension(
                "RiskProblem::new",
                format!("{} draw values do not tile rows of length {dim}", draws.len()),
            ));
        }
        if draws.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("RiskProblem::new", "non-finite draws"));
        }
        let domain = loss.domain();
        let mut clamped = 0;
        for row in draws.chunks_exact_mut(dim) {
            if domain.project(row) {
                clamped += 1;
            }
        }
        let s = draws.len() / dim;
        Ok(RiskProblem {
            loss,
            draws,
            s,
            domain,
            clamped,
            settings: OptimizerSettings::default(),
        })
    }

    pub fn with_settings(mut self, settings: OptimizerSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn draw_count(&self) -> usize {
        self.s
    }

    /// Number of posterior draws that had to be moved onto the loss domain.
    pub fn clamped_draws(&self) -> usize {
        self.clamped
    }

    pub fn loss(&self) -> &dyn Loss {
        self.loss.as_ref()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Monte Carlo posterior risk (1/S)·Σ_s ℓ(t, ϑ_s) over the frozen draws.
    /// Deterministic in t; errors if t is outside the loss domain.
    pub fn mc_risk(&self, t: &[f64]) -> Result<f64> {
        if !self.domain.contains(t) {
            return Err(Error::domain(
                "mc_risk",
                format!("candidate {t:?} outside the loss domain"),
            ));
        }
        Ok(self.loss.eval_batch_sum(t, &self.draws)? / self.s as f64)
    }

    /// Minimize the Monte Carlo risk over the loss domain.
    ///
    /// Requires at least 100 draws so the surface is stable enough to rank
    /// candidates. Ties within tolerance are broken by construction: the 1-D
    /// path returns the final bracket midpoint and Nelder–Mead the best
    /// vertex, unless some other evaluated point had strictly lower risk.
    pub fn minimize_risk(&self) -> Result<MinimizeResult> {
        if self.s < 100 {
            return Err(Error::config(format!(
                "minimize_risk needs at least 100 draws for a stable surface, got {}",
                self.s
            )));
        }
        if self.loss.dim() == 1 {
            self.minimize_1d()
        } else {
            self.minimize_nelder_mead()
        }
    }

    /// Per-coordinate search bounds: the loss domain intersected with the
    /// draw hull (every loss here has one-sided monotone sections in t, so
    /// minimizers cannot leave the hull).
    fn search_bounds(&self) -> Vec<(f64, f64)> {
        let dim = self.loss.dim();
        let mut bounds = match &self.domain {
            Domain::Box(b) => b.clone(),
            Domain::Simplex { margin, .. } => vec![(*margin, 1.0 - margin); dim],
        };
        for (k, bound) in bounds.iter_mut().enumerate() {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for row in self.draws.chunks_exact(dim) {
                lo = lo.min(row[k]);
                hi = hi.max(row[k]);
            }
            bound.0 = bound.0.max(lo);
            bound.1 = bound.1.min(hi);
        }
        bounds
    }

    fn minimize_1d(&self) -> Result<MinimizeResult> {
        let settings = self.settings;
        let (lo, hi) = self.search_bounds()[0];
        let mut trace = Vec::new();
        let mut evals = 0usize;
        let mut best: Option<(f64, f64)> = None;
        let mut eval = |x: f64, trace: &mut Vec<TracePoint>, evals: &mut usize| -> Result<f64> {
            let r = self.mc_risk(&[x])?;
            trace.push(TracePoint { point: vec![x], risk: r });
            *evals += 1;
            if best.map_or(true, |(_, br)| r < br) {
                best = Some((x, r));
            }
            Ok(r)
        };

        if !(hi > lo) {
            // Degenerate hull (all draws equal): the minimizer is that point.
            let r = eval(lo, &mut trace, &mut evals)?;
            let _ = r;
            let (bx, br) = best.expect("one evaluation");
            return Ok(MinimizeResult {
                point: vec![bx],
                risk: br,
                converged: true,
                evaluations: evals,
                trace,
            });
        }

        // Bracket on a uniform grid.
        let g = settings.grid_points.max(4);
        let mut grid_best = (0usize, f64::INFINITY);
        for i in 0..g {
            let x = lo + (hi - lo) * i as f64 / (g - 1) as f64;
            let r = eval(x, &mut trace, &mut evals)?;
            if r < grid_best.1 {
                grid_best = (i, r);
            }
        }
        let step = (hi - lo) / (g - 1) as f64;
        let mut a = lo + step * grid_best.0.saturating_sub(1) as f64;
        let mut b = (lo + step * (grid_best.0 + 1) as f64).min(hi);

        // Golden-section polish.
        let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
        let mut x1 = b - inv_phi * (b - a);
        let mut x2 = a + inv_phi * (b - a);
        let mut f1 = eval(x1, &mut trace, &mut evals)?;
        let mut f2 = eval(x2, &mut trace, &mut evals)?;
        let mut converged = false;
        for _ in 0..settings.max_iter {
            if b - a <= settings.golden_tol {
                converged = true;
                break;
            }
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = eval(x1, &mut trace, &mut evals)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = eval(x2, &mut trace, &mut evals)?;
            }
        }
        let mid = 0.5 * (a + b);
        eval(mid, &mut trace, &mut evals)?;
        let (bx, br) = best.expect("at least one evaluation");
        Ok(MinimizeResult {
            point: vec![bx],
            risk: br,
            converged,
            evaluations: evals,
            trace,
        })
    }

    fn minimize_nelder_mead(&self) -> Result<MinimizeResult> {
        let settings = self.settings;
        let dim = self.loss.dim();
        let bounds = self.search_bounds();
        let mut trace = Vec::new();
        let mut evals = 0usize;
        let mut best: Option<(Vec<f64>, f64)> = None;

        let project = |mut x: Vec<f64>| -> Vec<f64> {
            self.domain.project(&mut x);
            x
        };
        let mut eval = |x: Vec<f64>,
                        trace: &mut Vec<TracePoint>,
                        evals: &mut usize|
         -> Result<(Vec<f64>, f64)> {
            let r = self.mc_risk(&x)?;
            trace.push(TracePoint { point: x.clone(), risk: r });
            *evals += 1;
            if best.as_ref().map_or(true, |(_, br)| r < *br) {
                best = Some((x.clone(), r));
            }
            Ok((x, r))
        };

        // Start at the projected draw mean; offsets scale with the draw hull.
        let mut x0 = vec![0.0; dim];
        for row in self.draws.chunks_exact(dim) {
            for (acc, v) in x0.iter_mut().zip(row) {
                *acc += v;
            }
        }
        for v in x0.iter_mut() {
            *v /= self.s as f64;
        }
        let x0 = project(x0);
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        simplex.push(eval(x0.clone(), &mut trace, &mut evals)?);
        for k in 0..dim {
            let span = (bounds[k].1 - bounds[k].0).max(1e-6);
            let step = 0.1 * span;
            let mut v = x0.clone();
            v[k] += step;
            let mut v = project(v);
            if v == x0 {
                v = x0.clone();
                v[k] -= step;
                v = project(v);
            }
            simplex.push(eval(v, &mut trace, &mut evals)?);
        }

        const ALPHA: f64 = 1.0; // reflection
        const GAMMA: f64 = 2.0; // expansion
        const RHO: f64 = 0.5; // contraction
        const SIGMA: f64 = 0.5; // shrink

        let mut converged = false;
        for _ in 0..settings.max_iter {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let diameter = simplex
                .iter()
                .skip(1)
                .map(|(v, _)| {
                    v.iter()
                        .zip(&simplex[0].0)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if diameter <= settings.simplex_diameter_tol {
                converged = true;
                break;
            }

            let worst = simplex.len() - 1;
            let mut centroid = vec![0.0; dim];
            for (v, _) in &simplex[..worst] {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x;
                }
            }
            for c in centroid.iter_mut() {
                *c /= worst as f64;
            }

            let blend = |from: &[f64], toward: &[f64], w: f64| -> Vec<f64> {
                from.iter()
                    .zip(toward)
                    .map(|(c, x)| c + w * (c - x))
                    .collect()
            };
            let reflected = project(blend(&centroid, &simplex[worst].0, ALPHA));
            let (rx, rf) = eval(reflected, &mut trace, &mut evals)?;
            if rf < simplex[0].1 {
                let expanded = project(blend(&centroid, &simplex[worst].0, GAMMA));
                let (ex, ef) = eval(expanded, &mut trace, &mut evals)?;
                simplex[worst] = if ef < rf { (ex, ef) } else { (rx, rf) };
            } else if rf < simplex[worst - 1].1 {
                simplex[worst] = (rx, rf);
            } else {
                let outside = rf < simplex[worst].1;
                let anchor = if outside { &rx } else { &simplex[worst].0 };
                let contracted: Vec<f64> = centroid
                    .iter()
                    .zip(anchor)
                    .map(|(c, x)| c + RHO * (x - c))
                    .collect();
                let (cx, cf) = eval(project(contracted), &mut trace, &mut evals)?;
                let reference = if outside { rf } else { simplex[worst].1 };
                if cf < reference {
                    simplex[worst] = (cx, cf);
                } else {
                    // Shrink the whole simplex toward the best vertex.
                    let best_vertex = simplex[0].0.clone();
                    for entry in simplex.iter_mut().skip(1) {
                        let shrunk: Vec<f64> = best_vertex
                            .iter()
                            .zip(&entry.0)
                            .map(|(b, x)| b + SIGMA * (x - b))
                            .collect();
                        *entry = eval(project(shrunk), &mut trace, &mut evals)?;
                    }
                }
            }
        }

        let (bx, br) = best.expect("simplex was evaluated");
        Ok(MinimizeResult {
            point: bx,
            risk: br,
            converged,
            evaluations: evals,
            trace,
        })
    }
}
