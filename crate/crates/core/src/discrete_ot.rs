//! Discrete optimal transport: a dense two-phase simplex solver for small
//! standard-form linear programs, the multinomial barycenter LP and its dual,
//! exact transport between discrete measures, and exact empirical
//! 2-Wasserstein distances used as diagnostics.
//!
//! Everything here is deliberately small-scale and deterministic: dense
//! tableaus with Bland's anti-cycling rule for LPs of at most a few thousand
//! entries, and an integer auction for assignment problems up to 512 points.

use serde::Serialize;

use crate::error::{Error, Result};

/// Standard-form linear program: min cᵀx subject to Ax = b, x ≥ 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StandardLP {
    /// Cost vector (length = number of variables).
    pub c: Vec<f64>,
    /// Dense constraint matrix, row major.
    pub a: Vec<Vec<f64>>,
    /// Right-hand side (length = number of rows).
    pub b: Vec<f64>,
}

impl StandardLP {
    pub fn new(c: Vec<f64>, a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::dimension(
                "StandardLP::new",
                format!("{} rows vs {} rhs entries", a.len(), b.len()),
            ));
        }
        if c.is_empty() {
            return Err(Error::dimension("StandardLP::new", "no variables"));
        }
        if a.iter().any(|row| row.len() != c.len()) {
            return Err(Error::dimension(
                "StandardLP::new",
                "constraint row length differs from cost length",
            ));
        }
        let finite = c.iter().chain(b.iter()).chain(a.iter().flatten());
        if finite.into_iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("StandardLP::new", "non-finite entries"));
        }
        Ok(StandardLP { c, a, b })
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn num_rows(&self) -> usize {
        self.b.len()
    }
}

/// Optimal vertex returned by [`simplex_solve`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

/// Outcome of solving a standard-form LP.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

/// Entries smaller than this are treated as zero during pivoting.
const PIVOT_TOL: f64 = 1e-9;
/// Phase-one objective above this is judged infeasible.
const FEAS_TOL: f64 = 1e-7;

struct Tableau {
    /// m rows of n+1 entries; the last column is the right-hand side.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        *self.rows[i].last().expect("augmented row")
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let scale = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= scale;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = r[col];
            if factor != 0.0 {
                for (v, p) in r.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }
}

enum RunOutcome {
    Optimal,
    Unbounded,
}

/// Primal simplex with Bland's rule on the columns `0..allowed`.
fn run_simplex(tab: &mut Tableau, cost: &[f64], allowed: usize) -> Result<RunOutcome> {
    let m = tab.rows.len();
    let max_iter = 2000 * (allowed + m + 1);
    for _ in 0..max_iter {
        // Reduced costs r_j = c_j − c_Bᵀ B⁻¹ A_j from the updated tableau.
        let mut entering = None;
        for j in 0..allowed {
            if tab.basis.contains(&j) {
                continue;
            }
            let mut r = cost[j];
            for (i, row) in tab.rows.iter().enumerate() {
                r -= cost[tab.basis[i]] * row[j];
            }
            if r < -PIVOT_TOL {
                entering = Some(j);
                break; // Bland: smallest improving index.
            }
        }
        let Some(col) = entering else {
            return Ok(RunOutcome::Optimal);
        };
        // Ratio test; ties go to the smallest basis index (Bland).
        let mut leaving: Option<(usize, f64)> = None;
        for i in 0..m {
            let coeff = tab.rows[i][col];
            if coeff > PIVOT_TOL {
                let ratio = tab.rhs(i) / coeff;
                let better = match leaving {
                    None => true,
                    Some((best_i, best_ratio)) => {
                        ratio < best_ratio - 1e-12
                            || (ratio < best_ratio + 1e-12 && tab.basis[i] < tab.basis[best_i])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leaving else {
            return Ok(RunOutcome::Unbounded);
        };
        tab.pivot(row, col);
    }
    Err(Error::numerics("simplex_solve", "iteration limit exceeded"))
}

/// Solve a standard-form LP with a dense two-phase primal simplex.
///
/// Deterministic: Bland's rule makes the basis path a pure function of the
/// input. Returns an optimal vertex with Ax = b satisfied to 1e-9, or the
/// infeasible/unbounded status.
pub fn simplex_solve(lp: &StandardLP) -> Result<LpOutcome> {
    // Re-validate in case fields were mutated after construction.
    let lp = StandardLP::new(lp.c.clone(), lp.a.clone(), lp.b.clone())?;
    let n = lp.num_vars();
    let m = lp.num_rows();

    // Phase one: minimize the sum of artificial variables.
    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        basis: (n..n + m).collect(),
    };
    for (i, row) in lp.a.iter().enumerate() {
        let flip = if lp.b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut aug = Vec::with_capacity(n + m + 1);
        aug.extend(row.iter().map(|&v| flip * v));
        aug.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
        aug.push(flip * lp.b[i]);
        tab.rows.push(aug);
    }
    let mut phase1_cost = vec![0.0; n + m];
    for j in n..n + m {
        phase1_cost[j] = 1.0;
    }
    match run_simplex(&mut tab, &phase1_cost, n + m)? {
        RunOutcome::Unbounded => {
            return Err(Error::numerics(
                "simplex_solve",
                "phase one reported unbounded; sum of artificials is bounded below",
            ))
        }
        RunOutcome::Optimal => {}
    }
    let infeasibility: f64 = (0..m)
        .filter(|&i| tab.basis[i] >= n)
        .map(|i| tab.rhs(i))
        .sum();
    if infeasibility > FEAS_TOL {
        return Ok(LpOutcome::Infeasible);
    }

    // Drive remaining zero-level artificials out of the basis; an all-zero
    // row over the original columns is a redundant constraint and is dropped.
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= n {
            if let Some(col) = (0..n).find(|&j| tab.rows[i][j].abs() > PIVOT_TOL) {
                tab.pivot(i, col);
                i += 1;
            } else {
                tab.rows.remove(i);
                tab.basis.remove(i);
            }
        } else {
            i += 1;
        }
    }

    // Phase two over the original columns only.
    let mut phase2_cost = lp.c.clone();
    phase2_cost.extend(std::iter::repeat(0.0).take(m));
    match run_simplex(&mut tab, &phase2_cost, n)? {
        RunOutcome::Unbounded => return Ok(LpOutcome::Unbounded),
        RunOutcome::Optimal => {}
    }

    let mut x = vec![0.0; n];
    for (i, &j) in tab.basis.iter().enumerate() {
        if j < n {
            x[j] = tab.rhs(i).max(0.0);
        }
    }
    for (row, &bi) in lp.a.iter().zip(&lp.b) {
        let residual: f64 = row.iter().zip(&x).map(|(a, xi)| a * xi).sum::<f64>() - bi;
        if residual.abs() > 1e-9 {
            return Err(Error::numerics(
                "simplex_solve",
                format!("constraint residual {residual:.3e} exceeds 1e-9"),
            ));
        }
    }
    let objective = lp.c.iter().zip(&x).map(|(c, xi)| c * xi).sum();
    Ok(LpOutcome::Optimal(LpSolution { x, objective }))
}

/// Standard-form dual of a standard-form LP.
///
/// The dual of min cᵀx s.t. Ax = b, x ≥ 0 is max bᵀλ s.t. Aᵀλ ≤ c with λ
/// free. Splitting λ = u − v (u, v ≥ 0) and adding slacks z ≥ 0 gives
///
/// ```text
/// min (−bᵀ, bᵀ, 0)·(u, v, z)   s.t.   (Aᵀ, −Aᵀ, I)·(u, v, z) = c,
/// ```
///
/// so the primal optimum equals minus the optimum of the returned program.
pub fn lp_dual_standard_form(lp: &StandardLP) -> Result<StandardLP> {
    let n = lp.num_vars();
    let m = lp.num_rows();
    let mut c_dual = Vec::with_capacity(2 * m + n);
    c_dual.extend(lp.b.iter().map(|&v| -v));
    c_dual.extend(lp.b.iter().copied());
    c_dual.extend(std::iter::repeat(0.0).take(n));
    let mut a_dual = Vec::with_capacity(n);
    for j in 0..n {
        let mut row = Vec::with_capacity(2 * m + n);
        row.extend(lp.a.iter().map(|r| r[j]));
        row.extend(lp.a.iter().map(|r| -r[j]));
        row.extend((0..n).map(|k| if k == j { 1.0 } else { 0.0 }));
        a_dual.push(row);
    }
    StandardLP::new(c_dual, a_dual, lp.c.clone())
}

fn check_weights(op: &'static str, w: &[f64]) -> Result<()> {
    if w.len() < 2 {
        return Err(Error::dimension(op, "need at least two categories"));
    }
    if w.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::domain(op, "weights must be nonnegative and finite"));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::domain(op, format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

fn barycenter_lp_with_costs(freq: &[f64], head_cost: impl Fn(f64) -> f64) -> Vec<StandardLP> {
    let d = freq.len();
    let nfree = d - 1;
    let nvars = 2 * nfree + 1;
    let mut c = vec![0.0; nvars];
    for k in 0..nfree {
        c[k] = head_cost(freq[k]);
    }
    let mut a = vec![vec![0.0; nvars]; d];
    for (k, row) in a.iter_mut().enumerate().take(nfree) {
        row[k] = 1.0;
        row[nfree + k] = 1.0;
    }
    for k in 0..nfree {
        a[nfree][k] = 1.0;
    }
    a[nfree][2 * nfree] = 1.0;
    vec![StandardLP { c, a, b: vec![1.0; d] }]
}

/// Barycenter linear program for an observed frequency vector N over d
/// categories, in the variables x = (t₁,…,t_{d−1}, u₁,…,u_{d−1}, v):
///
/// * b = 𝟙_d,
/// * c = (1−N₁, …, 1−N_{d−1}, 0, …, 0),
/// * A = [[I, I, 0], [𝟙ᵀ, 0ᵀ, 1]].
pub fn build_barycenter_lp(freq: &[f64]) -> Result<StandardLP> {
    check_weights("build_barycenter_lp", freq)?;
    Ok(barycenter_lp_with_costs(freq, |n| 1.0 - n).pop().expect("one LP"))
}

/// Variant of the barycenter program whose objective, plus the constant
/// Σ_{k<d} N_k, equals the average coordinatewise transport risk
/// Σ_k N_k(1−t_k) + Σ_{j≠k} N_j t_k: head costs are 1 − 2N_k instead of
/// 1 − N_k. The two programs generally have different optima; see the
/// `barycenter-lp` CLI report, which prints both and flags the gap.
pub fn build_barycenter_risk_lp(freq: &[f64]) -> Result<StandardLP> {
    check_weights("build_barycenter_risk_lp", freq)?;
    Ok(barycenter_lp_with_costs(freq, |n| 1.0 - 2.0 * n).pop().expect("one LP"))
}

/// Standard-form dual of [`build_barycenter_lp`], built by the u − v
/// splitting of the free dual vector.
pub fn build_barycenter_dual(freq: &[f64]) -> Result<StandardLP> {
    lp_dual_standard_form(&build_barycenter_lp(freq)?)
}

/// Coupling between two discrete measures.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportPlan {
    /// n×m nonnegative matrix π with the prescribed marginals.
    pub pi: Vec<Vec<f64>>,
    pub row_marginals: Vec<f64>,
    pub col_marginals: Vec<f64>,
}

impl TransportPlan {
    pub fn new(pi: Vec<Vec<f64>>, row_marginals: Vec<f64>, col_marginals: Vec<f64>) -> Result<Self> {
        if pi.len() != row_marginals.len()
            || pi.iter().any(|r| r.len() != col_marginals.len())
        {
            return Err(Error::dimension("TransportPlan::new", "shape mismatch"));
        }
        if pi.iter().flatten().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::domain("TransportPlan::new", "entries must be nonnegative"));
        }
        for (row, &target) in pi.iter().zip(&row_marginals) {
            let sum: f64 = row.iter().sum();
            if (sum - target).abs() > 1e-10 {
                return Err(Error::numerics(
                    "TransportPlan::new",
                    format!("row sum {sum} differs from marginal {target}"),
                ));
            }
        }
        for (j, &target) in col_marginals.iter().enumerate() {
            let sum: f64 = pi.iter().map(|r| r[j]).sum();
            if (sum - target).abs() > 1e-10 {
                return Err(Error::numerics(
                    "TransportPlan::new",
                    format!("column sum {sum} differs from marginal {target}"),
                ));
            }
        }
        Ok(TransportPlan { pi, row_marginals, col_marginals })
    }
}

/// Solve the discrete optimal-transport problem
/// min_π Σᵢⱼ πᵢⱼ·costᵢⱼ over couplings of μ and ν, exactly, via the
/// flattened standard-form LP (one redundant marginal constraint dropped).
pub fn solve_ot_lp(
    mu: &[f64],
    nu: &[f64],
    cost: &[Vec<f64>],
) -> Result<(TransportPlan, f64)> {
    check_weights("solve_ot_lp", mu)?;
    check_weights("solve_ot_lp", nu)?;
    let mass_gap = mu.iter().sum::<f64>() - nu.iter().sum::<f64>();
    if mass_gap.abs() > 1e-9 {
        return Err(Error::domain(
            "solve_ot_lp",
            format!("marginal mass mismatch {mass_gap:.3e}"),
        ));
    }
    let (n, m) = (mu.len(), nu.len());
    if cost.len() != n || cost.iter().any(|r| r.len() != m) {
        return Err(Error::dimension("solve_ot_lp", "cost matrix shape mismatch"));
    }
    if cost.iter().flatten().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::domain("solve_ot_lp", "costs must be nonnegative and finite"));
    }

    // Variables π_{ij} flattened row-major; constraints: n row sums and the
    // first m−1 column sums (the last is implied by mass balance).
    let nvars = n * m;
    let mut a = Vec::with_capacity(n + m - 1);
    let mut b = Vec::with_capacity(n + m - 1);
    for i in 0..n {
        let mut row = vec![0.0; nvars];
        for j in 0..m {
            row[i * m + j] = 1.0;
        }
        a.push(row);
        b.push(mu[i]);
    }
    for j in 0..m - 1 {
        let mut row = vec![0.0; nvars];
        for i in 0..n {
            row[i * m + j] = 1.0;
        }
        a.push(row);
        b.push(nu[j]);
    }
    let c: Vec<f64> = cost.iter().flatten().copied().collect();
    let lp = StandardLP::new(c, a, b)?;
    let solution = match simplex_solve(&lp)? {
        LpOutcome::Optimal(s) => s,
        other => {
            return Err(Error::numerics(
                "solve_ot_lp",
                format!("transport LP must be feasible and bounded, got {other:?}"),
            ))
        }
    };
    let pi: Vec<Vec<f64>> = (0..n)
        .map(|i| solution.x[i * m..(i + 1) * m].to_vec())
        .collect();
    let plan = TransportPlan::new(pi, mu.to_vec(), nu.to_vec())?;
    Ok((plan, solution.objective))
}

fn check_samples_1d(op: &'static str, s: &[f64]) -> Result<()> {
    if s.is_empty() {
        return Err(Error::domain(op, "empty sample set"));
    }
    if s.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain(op, "non-finite samples"));
    }
    Ok(())
}

/// Exact 2-Wasserstein distance between 1-D empirical distributions.
///
/// Equal sample counts reduce to the classical sorted pairing
/// √((1/M)·Σ (x₍ᵢ₎ − y₍ᵢ₎)²). Unequal counts are handled exactly as well,
/// by integrating the squared difference of the two step quantile functions
/// over the merged grid of jump points (no padding or subsampling).
pub fn empirical_w2_1d(x: &[f64], y: &[f64]) -> Result<f64> {
    check_samples_1d("empirical_w2_1d", x)?;
    check_samples_1d("empirical_w2_1d", y)?;
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len() as u64, ys.len() as u64);
    let scale = (n as f64) * (m as f64);
    let (mut i, mut j) = (0u64, 0u64);
    let mut prev = 0u64; // breakpoints as integers over the denominator n·m
    let mut acc = 0.0;
    while i < n && j < m {
        let bx = (i + 1) * m;
        let by = (j + 1) * n;
        let next = bx.min(by);
        let d = xs[i as usize] - ys[j as usize];
        acc += d * d * ((next - prev) as f64 / scale);
        prev = next;
        if bx == next {
            i += 1;
        }
        if by == next {
            j += 1;
        }
    }
    Ok(acc.sqrt())
}

/// Largest point count accepted by the exact planar assignment path.
pub const MAX_ASSIGNMENT_SIZE: usize = 512;

/// Exact 2-Wasserstein distance between planar empirical distributions with
/// equal sample counts M ≤ 512: √((1/M)·min_σ Σ ‖xᵢ − y_σ(i)‖²), with the
/// optimal assignment found by an integer auction with ε-scaling.
///
/// Costs are rounded to a grid no coarser than max‖·‖²/1e12 and multiplied
/// by M+1, so the final ε = 1 round certifies an assignment that is optimal
/// for the rounded costs; arguments are ordered canonically first, making
/// the result exactly symmetric. Unequal counts or M > 512 are errors.
pub fn empirical_w2_2d(x: &[[f64; 2]], y: &[[f64; 2]]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::domain("empirical_w2_2d", "empty sample set"));
    }
    if x.len() != y.len() {
        return Err(Error::dimension(
            "empirical_w2_2d",
            format!("equal sample counts required, got {} vs {}", x.len(), y.len()),
        ));
    }
    if x.len() > MAX_ASSIGNMENT_SIZE {
        return Err(Error::domain(
            "empirical_w2_2d",
            format!("exact assignment capped at {MAX_ASSIGNMENT_SIZE} points"),
        ));
    }
    if x.iter().chain(y).flatten().any(|v| !v.is_finite()) {
        return Err(Error::domain("empirical_w2_2d", "non-finite samples"));
    }

    // Canonical argument order makes the distance exactly symmetric even if
    // the rounded assignment problem has cost ties.
    let flat = |s: &[[f64; 2]]| s.iter().flatten().copied().collect::<Vec<f64>>();
    let (first, second) = if flat(x)
        .iter()
        .zip(flat(y).iter())
        .find_map(|(a, b)| match a.total_cmp(b) {
            std::cmp::Ordering::Equal => None,
            ord => Some(ord),
        })
        .unwrap_or(std::cmp::Ordering::Equal)
        == std::cmp::Ordering::Greater
    {
        (y, x)
    } else {
        (x, y)
    };

    let msize = first.len();
    let mut cost = vec![vec![0.0f64; msize]; msize];
    let mut max_cost = 0.0f64;
    for (i, p) in first.iter().enumerate() {
        for (j, q) in second.iter().enumerate() {
            let dx = p[0] - q[0];
            let dy = p[1] - q[1];
            let c = dx * dx + dy * dy;
            cost[i][j] = c;
            max_cost = max_cost.max(c);
        }
    }
    if max_cost == 0.0 {
        return Ok(0.0);
    }
    if msize == 1 {
        return Ok(cost[0][0].sqrt());
    }

    let assignment = auction_assignment(&cost, max_cost);
    let mut total = 0.0;
    for (i, &j) in assignment.iter().enumerate() {
        total += cost[i][j];
    }
    Ok((total / msize as f64).sqrt())
}

/// Optimal assignment minimizing Σ cost[i][σ(i)] via the auction algorithm
/// on integer benefits, ε-scaled down to the exactness threshold.
fn auction_assignment(cost: &[Vec<f64>], max_cost: f64) -> Vec<usize> {
    let msize = cost.len();
    let resolution = (max_cost / 1e12).max(1e-15);
    let big_m = msize as i128 + 1;
    let benefits: Vec<Vec<i128>> = cost
        .iter()
        .map(|row| {
            row.iter()
                .map(|&c| -((c / resolution).round() as i128) * big_m)
                .collect()
        })
        .collect();
    let range = benefits
        .iter()
        .flatten()
        .map(|&v| -v)
        .max()
        .unwrap_or(0);

    let mut prices = vec![0i128; msize];
    let mut owner = vec![usize::MAX; msize];
    let mut assigned = vec![usize::MAX; msize];
    let mut eps = (range / 2).max(1);
    loop {
        owner.fill(usize::MAX);
        assigned.fill(usize::MAX);
        let mut pending: Vec<usize> = (0..msize).rev().collect();
        while let Some(person) = pending.pop() {
            let mut best_j = 0;
            let mut best_v = i128::MIN;
            let mut second_v = i128::MIN;
            for (j, (&bj, &pj)) in benefits[person].iter().zip(&prices).enumerate() {
                let v = bj - pj;
                if v > best_v {
                    second_v = best_v;
                    best_v = v;
                    best_j = j;
                } else if v > second_v {
                    second_v = v;
                }
            }
            prices[best_j] += best_v - second_v + eps;
            let previous = owner[best_j];
            owner[best_j] = person;
            assigned[person] = best_j;
            if previous != usize::MAX {
                assigned[previous] = usize::MAX;
                pending.push(previous);
            }
        }
        if eps <= 1 {
            break;
        }
        eps = (eps / 5).max(1);
    }
    assigned
}
