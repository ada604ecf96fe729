//! Python bindings for the bvmlab numerical laboratory.
//!
//! The compiled cdylib imports as `bvmlab_py` and exposes the core crate's
//! main types and operations: loss evaluation by canonical name, conjugate
//! posteriors with exact updates and reproducible sampling, Monte Carlo
//! posterior-risk minimization, exact discrete optimal transport and
//! barycenter linear programs, Gaussian transport divergences, and the
//! goodness-of-fit statistics used to compare estimator errors against their
//! Gaussian limit.
//!
//! Build with `cargo build -p bvmlab-py`; `python/smoke_test.py` at the
//! workspace root shows how to load the resulting shared library directly
//! from the cargo target directory.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use bvmlab::asymptotics;
use bvmlab::bayes_opt;
use bvmlab::cli::{loss_by_name, LOSS_NAMES};
use bvmlab::discrete_ot::{self, LpOutcome, StandardLP};
use bvmlab::losses::{self, GaussParams};
use bvmlab::posterior;
use bvmlab::special::rng::RngStream;
use bvmlab::wass_calculus;

/// Map a core error onto `ValueError`; the display string already names the
/// failing operation, so no extra context is needed on the Python side.
fn err(e: bvmlab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn gauss_params(label: &str, v: &[f64]) -> PyResult<GaussParams> {
    GaussParams::from_slice(v)
        .map_err(|e| PyValueError::new_err(format!("{label}: {e}")))
}

/// Canonical names accepted by `loss_value`, `loss_gradient`, and
/// `RiskProblem`.
#[pyfunction]
fn loss_names() -> Vec<&'static str> {
    LOSS_NAMES.to_vec()
}

/// Evaluate the named loss ℓ(t, ϑ); vector length selects the dimension for
/// the losses that support several.
#[pyfunction]
fn loss_value(name: &str, t: Vec<f64>, theta: Vec<f64>) -> PyResult<f64> {
    if t.len() != theta.len() {
        return Err(PyValueError::new_err(format!(
            "t has length {} but theta has length {}",
            t.len(),
            theta.len()
        )));
    }
    let loss = loss_by_name(name, t.len()).map_err(err)?;
    loss.eval(&t, &theta).map_err(err)
}

/// Gradient ∂ℓ/∂t of the named loss, or `None` when the loss does not carry
/// an analytic gradient.
#[pyfunction]
fn loss_gradient(name: &str, t: Vec<f64>, theta: Vec<f64>) -> PyResult<Option<Vec<f64>>> {
    if t.len() != theta.len() {
        return Err(PyValueError::new_err(format!(
            "t has length {} but theta has length {}",
            t.len(),
            theta.len()
        )));
    }
    let loss = loss_by_name(name, t.len()).map_err(err)?;
    loss.grad_t(&t, &theta).map_err(err)
}

/// Gradient of the squared 2-Wasserstein distance on the Pareto shape family
/// in its first argument, computed through the dual potential rather than the
/// closed form.
#[pyfunction]
fn pareto_w2_gradient(t0: f64, theta: f64) -> PyResult<f64> {
    let model = wass_calculus::pareto_dual_model();
    wass_calculus::w2_gradient_dual(&model, t0, theta).map_err(err)
}

/// Second derivative companion to [`pareto_w2_gradient`].
#[pyfunction]
fn pareto_w2_hessian(t0: f64, theta: f64) -> PyResult<f64> {
    let model = wass_calculus::pareto_dual_model();
    wass_calculus::w2_hessian_dual(&model, t0, theta).map_err(err)
}

/// Raw entropy-regularized transport cost S_λ between bivariate Gaussians;
/// parameters pack as (μ₁, μ₂, σ₁₁, σ₁₂, σ₂₂). Note S_λ(P, P) ≠ 0.
#[pyfunction]
fn sinkhorn_gauss2(p: Vec<f64>, q: Vec<f64>, lambda: f64) -> PyResult<f64> {
    let p = gauss_params("p", &p)?;
    let q = gauss_params("q", &q)?;
    losses::sinkhorn_gauss2(&p, &q, lambda).map_err(err)
}

/// Centered Sinkhorn divergence S_λ(P,Q) − ½S_λ(P,P) − ½S_λ(Q,Q); zero at
/// P = Q and symmetric.
#[pyfunction]
fn sinkhorn_divergence(p: Vec<f64>, q: Vec<f64>, lambda: f64) -> PyResult<f64> {
    let p = gauss_params("p", &p)?;
    let q = gauss_params("q", &q)?;
    losses::sinkhorn_centered(&p, &q, lambda).map_err(err)
}

/// Squared 2-Wasserstein distance between bivariate Gaussians (the λ → 0
/// limit of the Sinkhorn cost); same (μ₁, μ₂, σ₁₁, σ₁₂, σ₂₂) packing.
#[pyfunction]
fn gauss_w2sq(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    let p = gauss_params("p", &p)?;
    let q = gauss_params("q", &q)?;
    losses::w2sq_gauss2(&p, &q).map_err(err)
}

/// Standard-form linear program min cᵀx s.t. Ax = b, x ≥ 0, solved exactly
/// by the two-phase simplex method.
#[pyclass(frozen)]
struct LinearProgram {
    inner: StandardLP,
}

#[pymethods]
impl LinearProgram {
    #[new]
    fn new(c: Vec<f64>, a: Vec<Vec<f64>>, b: Vec<f64>) -> PyResult<Self> {
        Ok(LinearProgram {
            inner: StandardLP::new(c, a, b).map_err(err)?,
        })
    }

    #[getter]
    fn c(&self) -> Vec<f64> {
        self.inner.c.clone()
    }

    #[getter]
    fn a(&self) -> Vec<Vec<f64>> {
        self.inner.a.clone()
    }

    #[getter]
    fn b(&self) -> Vec<f64> {
        self.inner.b.clone()
    }

    /// Solve to an optimal vertex, returning `(x, objective)`; raises
    /// `ValueError` on infeasible or unbounded programs.
    fn solve(&self) -> PyResult<(Vec<f64>, f64)> {
        match discrete_ot::simplex_solve(&self.inner).map_err(err)? {
            LpOutcome::Optimal(s) => Ok((s.x, s.objective)),
            LpOutcome::Infeasible => Err(PyValueError::new_err("linear program is infeasible")),
            LpOutcome::Unbounded => Err(PyValueError::new_err("linear program is unbounded")),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "LinearProgram({} variables, {} equality rows)",
            self.inner.num_vars(),
            self.inner.num_rows()
        )
    }
}

/// Linear program whose optimum is a discrete barycenter of point masses at
/// the simplex vertices, weighted by `freq`.
#[pyfunction]
fn barycenter_lp(freq: Vec<f64>) -> PyResult<LinearProgram> {
    Ok(LinearProgram {
        inner: discrete_ot::build_barycenter_lp(&freq).map_err(err)?,
    })
}

/// Variant of [`barycenter_lp`] whose objective is calibrated so the optimal
/// value reports the transport risk of the chosen point.
#[pyfunction]
fn barycenter_risk_lp(freq: Vec<f64>) -> PyResult<LinearProgram> {
    Ok(LinearProgram {
        inner: discrete_ot::build_barycenter_risk_lp(&freq).map_err(err)?,
    })
}

/// Standard-form dual of [`barycenter_lp`]; its optimum is the negated primal
/// optimum, so the two solves certify each other.
#[pyfunction]
fn barycenter_dual_lp(freq: Vec<f64>) -> PyResult<LinearProgram> {
    Ok(LinearProgram {
        inner: discrete_ot::build_barycenter_dual(&freq).map_err(err)?,
    })
}

/// Exact discrete optimal transport between weight vectors `mu` and `nu`
/// under the given cost matrix; returns `(plan, value)` where `plan` is the
/// optimal coupling matrix.
#[pyfunction]
fn solve_transport(
    mu: Vec<f64>,
    nu: Vec<f64>,
    cost: Vec<Vec<f64>>,
) -> PyResult<(Vec<Vec<f64>>, f64)> {
    let (plan, value) = discrete_ot::solve_ot_lp(&mu, &nu, &cost).map_err(err)?;
    Ok((plan.pi, value))
}

/// Empirical 2-Wasserstein distance between two equal-size one-dimensional
/// samples (sorted-coupling form).
#[pyfunction]
fn empirical_w2_1d(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    discrete_ot::empirical_w2_1d(&x, &y).map_err(err)
}

/// Kolmogorov–Smirnov distance between the sample and the standard normal.
#[pyfunction]
fn ks_statistic(samples: Vec<f64>) -> PyResult<f64> {
    asymptotics::ks_statistic(&samples).map_err(err)
}

/// Quantile–quantile points (normal quantile, sample order statistic) for
/// plotting a sample against the standard normal.
#[pyfunction]
fn qq_points(samples: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    asymptotics::qq_points(&samples).map_err(err)
}

/// Exact conjugate posterior: Gamma over an exponential rate or Dirichlet
/// over multinomial probabilities. Vector interfaces use 1 coordinate for
/// Gamma and the first d−1 simplex coordinates for Dirichlet.
#[pyclass(frozen, name = "Posterior")]
struct PyPosterior {
    inner: posterior::Posterior,
}

#[pymethods]
impl PyPosterior {
    /// Posterior for an exponential rate under a Gamma(a, b) prior after
    /// observing `data`.
    #[staticmethod]
    fn exp_gamma(a: f64, b: f64, data: Vec<f64>) -> PyResult<Self> {
        Ok(PyPosterior {
            inner: posterior::update_exp_gamma(a, b, &data).map_err(err)?,
        })
    }

    /// Posterior for multinomial probabilities under a Dirichlet(α) prior
    /// after observing per-category counts.
    #[staticmethod]
    fn mult_dirichlet(alpha: Vec<f64>, counts: Vec<u64>) -> PyResult<Self> {
        Ok(PyPosterior {
            inner: posterior::update_mult_dirichlet_counts(&alpha, &counts).map_err(err)?,
        })
    }

    /// Dimension of the parameter vectors this posterior produces.
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Posterior mean, in the same coordinates as `sample`.
    fn mean(&self) -> Vec<f64> {
        self.inner.mean()
    }

    /// Draw `s` parameter vectors with a counter-based ChaCha stream, so a
    /// given `(s, seed)` pair always returns the same draws.
    #[pyo3(signature = (s, seed = 0))]
    fn sample(&self, s: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
        let mut rng = RngStream::new(seed, 0).rng();
        let flat = self.inner.sample(s, &mut rng).map_err(err)?;
        let dim = self.inner.dim();
        Ok(flat.chunks_exact(dim).map(<[f64]>::to_vec).collect())
    }

    /// Density at `theta` (one-dimensional posteriors only).
    fn density(&self, theta: f64) -> PyResult<f64> {
        self.inner.density(theta).map_err(err)
    }

    /// `u`-quantile of the `k`-th marginal.
    fn marginal_quantile(&self, k: usize, u: f64) -> PyResult<f64> {
        self.inner.marginal_quantile(k, u).map_err(err)
    }

    /// Total-variation distance between a one-dimensional posterior and the
    /// normal distribution with the given center and variance.
    fn tv_to_gaussian(&self, center: f64, var: f64) -> PyResult<f64> {
        posterior::posterior_tv_to_gaussian(&self.inner, center, var).map_err(err)
    }

    fn __repr__(&self) -> String {
        match &self.inner {
            posterior::Posterior::Gamma { shape, rate } => {
                format!("Posterior.Gamma(shape={shape}, rate={rate})")
            }
            posterior::Posterior::Dirichlet { alpha } => {
                format!("Posterior.Dirichlet(alpha={alpha:?})")
            }
        }
    }
}

/// Result of a posterior-risk minimization.
#[pyclass(frozen, get_all)]
struct MinimizeOutcome {
    /// Lowest-risk point found.
    point: Vec<f64>,
    /// Monte Carlo risk at `point`.
    risk: f64,
    /// False when the iteration cap was hit before the tolerance.
    converged: bool,
    /// Number of risk-surface evaluations performed.
    evaluations: usize,
}

#[pymethods]
impl MinimizeOutcome {
    fn __repr__(&self) -> String {
        format!(
            "MinimizeOutcome(point={:?}, risk={}, converged={}, evaluations={})",
            self.point, self.risk, self.converged, self.evaluations
        )
    }
}

/// Posterior-risk minimization problem: a frozen set of posterior draws plus
/// a loss. The Monte Carlo risk t ↦ (1/S)·Σ_s ℓ(t, ϑ_s) is deterministic
/// given the draws, so minimization is reproducible bit for bit.
#[pyclass(frozen, name = "RiskProblem")]
struct PyRiskProblem {
    inner: bayes_opt::RiskProblem,
}

#[pymethods]
impl PyRiskProblem {
    /// Freeze `draws` (a list of equal-length parameter rows) for the named
    /// loss; draws outside the loss domain are projected onto it.
    #[new]
    fn new(loss: &str, draws: Vec<Vec<f64>>) -> PyResult<Self> {
        let dim = match draws.first() {
            Some(row) if !row.is_empty() => row.len(),
            _ => {
                return Err(PyValueError::new_err(
                    "draws must contain at least one nonempty row",
                ));
            }
        };
        if draws.iter().any(|row| row.len() != dim) {
            return Err(PyValueError::new_err("draw rows must all have equal length"));
        }
        let loss = loss_by_name(loss, dim).map_err(err)?;
        let flat: Vec<f64> = draws.into_iter().flatten().collect();
        Ok(PyRiskProblem {
            inner: bayes_opt::RiskProblem::new(loss, flat).map_err(err)?,
        })
    }

    /// Canonical name of the frozen loss.
    fn loss_name(&self) -> &'static str {
        self.inner.loss().name()
    }

    /// Parameter dimension.
    fn dim(&self) -> usize {
        self.inner.loss().dim()
    }

    /// Number of frozen posterior draws.
    fn draw_count(&self) -> usize {
        self.inner.draw_count()
    }

    /// How many draws had to be projected onto the loss domain.
    fn clamped_draws(&self) -> usize {
        self.inner.clamped_draws()
    }

    /// Monte Carlo posterior risk at the candidate point `t`.
    fn mc_risk(&self, t: Vec<f64>) -> PyResult<f64> {
        self.inner.mc_risk(&t).map_err(err)
    }

    /// Minimize the Monte Carlo risk (golden-section in one dimension,
    /// Nelder–Mead with domain projection otherwise).
    fn minimize(&self) -> PyResult<MinimizeOutcome> {
        let result = self.inner.minimize_risk().map_err(err)?;
        Ok(MinimizeOutcome {
            point: result.point,
            risk: result.risk,
            converged: result.converged,
            evaluations: result.evaluations,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "RiskProblem(loss={:?}, draws={}, dim={})",
            self.inner.loss().name(),
            self.inner.draw_count(),
            self.inner.loss().dim()
        )
    }
}

/// Register every binding on `m`; shared by the module initializer and the
/// embedded-interpreter tests.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPosterior>()?;
    m.add_class::<PyRiskProblem>()?;
    m.add_class::<MinimizeOutcome>()?;
    m.add_class::<LinearProgram>()?;
    m.add_function(wrap_pyfunction!(loss_names, m)?)?;
    m.add_function(wrap_pyfunction!(loss_value, m)?)?;
    m.add_function(wrap_pyfunction!(loss_gradient, m)?)?;
    m.add_function(wrap_pyfunction!(pareto_w2_gradient, m)?)?;
    m.add_function(wrap_pyfunction!(pareto_w2_hessian, m)?)?;
    m.add_function(wrap_pyfunction!(sinkhorn_gauss2, m)?)?;
    m.add_function(wrap_pyfunction!(sinkhorn_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_w2sq, m)?)?;
    m.add_function(wrap_pyfunction!(barycenter_lp, m)?)?;
    m.add_function(wrap_pyfunction!(barycenter_risk_lp, m)?)?;
    m.add_function(wrap_pyfunction!(barycenter_dual_lp, m)?)?;
    m.add_function(wrap_pyfunction!(solve_transport, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_w2_1d, m)?)?;
    m.add_function(wrap_pyfunction!(ks_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(qq_points, m)?)?;
    Ok(())
}

#[pymodule]
fn bvmlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
