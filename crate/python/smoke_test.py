#!/usr/bin/env python3
"""Smoke test for the bvmlab_py extension module.

Build the module first, then run this script (from any directory):

    cargo build -p bvmlab-py
    python3 python/smoke_test.py

The script locates the compiled shared library in the cargo target
directory (release preferred, debug otherwise), stages it under an
importable name, and exercises the main types and operations end to end.
"""
from __future__ import annotations

import math
import shutil
import statistics
import sys
import tempfile
from pathlib import Path

CHECKS = 0


def check(label: str, ok: bool) -> None:
    global CHECKS
    if not ok:
        raise SystemExit(f"smoke test FAILED: {label}")
    CHECKS += 1
    print(f"  ok  {label}")


def import_bvmlab_py():
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / profile / "libbvmlab_py.so"
        for profile in ("release", "debug")
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        raise SystemExit(
            "libbvmlab_py.so not found under target/; run `cargo build -p bvmlab-py` first"
        )
    stage = Path(tempfile.mkdtemp(prefix="bvmlab-py-"))
    shutil.copy2(built, stage / "bvmlab_py.so")
    sys.path.insert(0, str(stage))
    import bvmlab_py

    return bvmlab_py


def main() -> None:
    lab = import_bvmlab_py()
    print(f"loaded {lab.__file__}")

    # --- losses ---------------------------------------------------------
    names = lab.loss_names()
    check("loss_names lists 10 canonical losses", len(names) == 10)

    kl = lab.loss_value("kl-exp", [1.0], [2.0])
    check(
        "KL loss matches its closed form t/θ − ln(t/θ) − 1",
        math.isclose(kl, math.log(2.0) - 0.5, rel_tol=0, abs_tol=1e-14),
    )
    check(
        "Stein loss mirrors KL with swapped arguments, bit for bit",
        lab.loss_value("stein-variance", [2.0], [1.0]) == kl,
    )
    w2 = lab.loss_value("w2sq-exp", [1.0], [2.0])
    check(
        "exponential W2² loss matches 2(1/t − 1/θ)²",
        math.isclose(w2, 0.5, rel_tol=0, abs_tol=1e-14),
    )
    h_ab = lab.loss_value("hellinger-exp", [0.7], [2.9])
    h_ba = lab.loss_value("hellinger-exp", [2.9], [0.7])
    check("Hellinger loss is symmetric", h_ab == h_ba and 0.0 < h_ab < 1.0)

    check(
        "losses without analytic gradients report None",
        lab.loss_gradient("kl-exp", [1.0], [2.0]) is None,
    )
    (grad,) = lab.loss_gradient("w2sq-pareto", [3.0], [4.0])
    check(
        "Pareto W2² gradient hits its closed-form value at (3, 4)",
        math.isclose(grad, -0.72, rel_tol=0, abs_tol=1e-12),
    )
    dual_grad = lab.pareto_w2_gradient(3.0, 4.0)
    check(
        "dual-potential gradient agrees with the closed form",
        math.isclose(dual_grad, grad, rel_tol=0, abs_tol=1e-6),
    )
    step = 1e-5
    fd_hess = (
        lab.loss_gradient("w2sq-pareto", [3.0 + step], [4.0])[0]
        - lab.loss_gradient("w2sq-pareto", [3.0 - step], [4.0])[0]
    ) / (2.0 * step)
    check(
        "dual-potential Hessian agrees with finite differences of the gradient",
        math.isclose(lab.pareto_w2_hessian(3.0, 4.0), fd_hess, rel_tol=1e-4),
    )

    # --- Gaussian transport divergences ----------------------------------
    p = [0.0, 0.0, 1.0, 0.2, 0.8]
    q = [0.5, -0.3, 1.3, -0.1, 0.6]
    check(
        "centered Sinkhorn divergence vanishes at P = Q",
        abs(lab.sinkhorn_divergence(p, p, 0.7)) < 1e-10,
    )
    check(
        "centered Sinkhorn divergence is symmetric",
        math.isclose(
            lab.sinkhorn_divergence(p, q, 0.7),
            lab.sinkhorn_divergence(q, p, 0.7),
            rel_tol=1e-9,
        ),
    )
    check(
        "raw Sinkhorn cost differs from the centered divergence at P = P",
        abs(lab.sinkhorn_gauss2(p, p, 0.7)) > 1e-3,
    )
    check("Gaussian W2² is positive at distinct parameters", lab.gauss_w2sq(p, q) > 0.0)

    # --- conjugate posteriors --------------------------------------------
    post = lab.Posterior.exp_gamma(2.0, 2.0, [1.0, 2.0, 3.0])
    check("Gamma posterior repr names its parameters", "Gamma" in repr(post))
    check(
        "Gamma(2,2) + data (1,2,3) updates to mean 5/8",
        post.dim() == 1
        and math.isclose(post.mean()[0], 0.625, rel_tol=0, abs_tol=1e-14),
    )
    check(
        "posterior sampling is reproducible per seed",
        post.sample(5, seed=3) == post.sample(5, seed=3)
        and post.sample(5, seed=3) != post.sample(5, seed=4),
    )
    draws = post.sample(2000, seed=11)
    sample_mean = statistics.fmean(row[0] for row in draws)
    check(
        "posterior sample mean is near the exact mean",
        abs(sample_mean - 0.625) < 0.03,
    )
    mid = post.marginal_quantile(0, 0.5)
    check(
        "marginal quantiles bracket the median sensibly",
        post.marginal_quantile(0, 0.1) < mid < post.marginal_quantile(0, 0.9),
    )
    dens = post.density(mid)
    check("posterior density is positive at the median", dens > 0.0)

    tv_matched = post.tv_to_gaussian(0.625, 5.0 / 64.0)
    tv_shifted = post.tv_to_gaussian(1.125, 5.0 / 64.0)
    check(
        "TV distance to the moment-matched Gaussian beats a shifted center",
        0.0 < tv_matched < tv_shifted <= 1.0,
    )

    dirichlet = lab.Posterior.mult_dirichlet([1.0, 1.0, 1.0], [6, 3, 1])
    check(
        "Dirichlet(1,1,1) + counts (6,3,1) updates to mean (7/13, 4/13)",
        dirichlet.dim() == 2
        and math.isclose(dirichlet.mean()[0], 7.0 / 13.0, rel_tol=0, abs_tol=1e-14)
        and math.isclose(dirichlet.mean()[1], 4.0 / 13.0, rel_tol=0, abs_tol=1e-14),
    )
    rows = dirichlet.sample(100, seed=1)
    check(
        "Dirichlet draws stay inside the simplex",
        all(r[0] > 0 and r[1] > 0 and r[0] + r[1] < 1 for r in rows),
    )
    try:
        dirichlet.density(0.5)
        check("scalar density on a vector posterior raises ValueError", False)
    except ValueError:
        check("scalar density on a vector posterior raises ValueError", True)

    # --- posterior-risk minimization --------------------------------------
    problem = lab.RiskProblem("kl-exp", draws)
    check(
        "risk problem freezes the draw set",
        problem.draw_count() == 2000
        and problem.dim() == 1
        and problem.loss_name() == "kl-exp",
    )
    outcome = problem.minimize()
    harmonic = len(draws) / sum(1.0 / row[0] for row in draws)
    check("risk minimization converges", outcome.converged)
    check(
        "KL Bayes estimator is the harmonic mean of the frozen draws",
        abs(outcome.point[0] - harmonic) < 1e-6,
    )
    check(
        "reported risk is attained at the reported point",
        math.isclose(outcome.risk, problem.mc_risk(outcome.point), rel_tol=1e-12),
    )
    check(
        "minimizer beats the posterior mean under KL loss",
        outcome.risk <= problem.mc_risk([sample_mean]) + 1e-12,
    )
    check(
        "estimator is near the exact Bayes point (shape−1)/rate = 1/2",
        abs(outcome.point[0] - 0.5) < 0.05,
    )

    # --- exact transport and barycenter programs --------------------------
    plan, value = lab.solve_transport(
        [0.5, 0.5], [0.25, 0.75], [[0.0, 1.0], [1.0, 0.0]]
    )
    check(
        "0/1-cost transport cost equals 1 − Σ min(μᵢ, νᵢ)",
        math.isclose(value, 0.25, rel_tol=0, abs_tol=1e-12),
    )
    check(
        "transport plan satisfies its marginals",
        math.isclose(sum(plan[0]), 0.5, abs_tol=1e-12)
        and math.isclose(plan[0][0] + plan[1][0], 0.25, abs_tol=1e-12),
    )

    freq = [0.6, 0.3, 0.1]
    lp = lab.barycenter_lp(freq)
    check(
        "barycenter LP exposes consistent (c, A, b) blocks",
        len(lp.a) == len(lp.b) and all(len(row) == len(lp.c) for row in lp.a),
    )
    x, primal = lp.solve()
    check("barycenter LP solves to optimum 0 at the worked frequencies", abs(primal) < 1e-12)
    check("LP solution is a vertex with the right arity", len(x) == len(lp.c))
    _, dual_opt = lab.barycenter_dual_lp(freq).solve()
    check("strong duality holds to 1e-9", abs(primal + dual_opt) < 1e-9)
    _, risk_opt = lab.barycenter_risk_lp(freq).solve()
    check(
        "risk-calibrated LP optimum hits its known value −0.2",
        math.isclose(risk_opt, -0.2, rel_tol=0, abs_tol=1e-9),
    )
    check("LinearProgram repr summarizes its shape", "variables" in repr(lp))

    d = lab.empirical_w2_1d([0.0, 1.0, 2.0], [1.0, 2.0, 3.0])
    check(
        "empirical 1-D W2 of a translated sample is the shift",
        math.isclose(d, 1.0, rel_tol=0, abs_tol=1e-12),
    )

    # --- goodness-of-fit statistics ----------------------------------------
    norm = statistics.NormalDist()
    stratified = [norm.inv_cdf((i + 0.5) / 400.0) for i in range(400)]
    ks = lab.ks_statistic(stratified)
    check("KS distance of stratified normal quantiles is tiny", 0.0 <= ks < 0.01)
    points = lab.qq_points(stratified)
    check(
        "QQ points are monotone along both axes",
        len(points) == 400
        and all(a < c and b <= d for (a, b), (c, d) in zip(points, points[1:])),
    )

    # --- error mapping ------------------------------------------------------
    try:
        lab.loss_value("no-such-loss", [1.0], [1.0])
        check("unknown loss names raise ValueError", False)
    except ValueError:
        check("unknown loss names raise ValueError", True)

    print(f"smoke test passed ({CHECKS} checks)")


if __name__ == "__main__":
    main()
