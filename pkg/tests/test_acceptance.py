"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``
for the summary lines alone.
"""

import functools
import math
import os
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from conftest import scalar_family, tiny_qp  # noqa: E402
from exgap.baselines import ADMM_VARIANTS, run_baseline  # noqa: E402
from exgap.bench.generators import (BASIS_PURSUIT_BETA0, generate_basis_pursuit,  # noqa: E402
                                    generate_nonsmooth, generate_qp)
from exgap.bench.profile import RunRecord, performance_profile  # noqa: E402
from exgap.egap import (GOLDEN_TAU0, SolveOptions, init_point, run_algorithm1,  # noqa: E402
                        run_algorithm2, run_fixed_beta1, tau_bounds, update_tau_dual)
from exgap.model import compute_constants  # noqa: E402
from exgap.smooth import penalty, smoothed_dual  # noqa: E402

RESULTS = {}


def report(number, ok, detail, elapsed):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  ({elapsed:.1f} s)  {detail}"
    RESULTS[number] = line
    print(line, file=sys.__stdout__, flush=True)
    return ok


def timed(number):
    def wrap(check):
        @functools.wraps(check)
        def run():
            t0 = time.perf_counter()
            ok, detail = check()
            return report(number, ok, detail, time.perf_counter() - t0)
        return run
    return wrap


# shared instances ------------------------------------------------------------

def invariant_suite():
    """Ten scalar closed-form instances plus ten nonsmooth instances with n <= 100."""
    return ([scalar_family(s) for s in range(10)]
            + [generate_nonsmooth(n) for n in (3, 5, 8, 13, 21, 34, 50, 64, 89, 100)])


@functools.lru_cache(maxsize=None)
def invariant_traces():
    opts = SolveOptions(maxiter=500, check_stopping=False)
    return [(driver.__name__, p.name, driver(p, opts))
            for p in invariant_suite() for driver in (run_algorithm1, run_algorithm2)]


def envelope_qp(seed):
    return generate_qp(1, "I", seed, M=2, m=2, n_range=(1, 4))


@functools.lru_cache(maxsize=None)
def reference_run(seed, iterations=100_000):
    """Long Algorithm 1 run; ``R`` is the largest dual iterate norm it visits."""
    norms = []
    opts = SolveOptions(maxiter=iterations, check_stopping=False,
                        callback=lambda k, s, it: norms.append(float(np.linalg.norm(it.y))))
    rep = run_algorithm1(envelope_qp(seed), opts)
    return rep, max(norms)


# criteria --------------------------------------------------------------------

@timed(1)
def criterion_1():
    worst = -np.inf
    for _, _, rep in invariant_traces():
        for r in rep.trace:
            worst = max(worst, r.fval - r.gval - r.delta - 1e-8 * (1 + abs(r.gval)))
    return worst <= 0, f"max of f - g - delta - tol over 40 traces: {worst:.3e}"


@timed(2)
def criterion_2():
    worst = -np.inf
    for s in range(10):
        p = scalar_family(s)
        c = compute_constants(p)
        for beta1 in (0.1, 1.0, 10.0):
            it, _, _ = init_point(p, beta1, 0.0)
            f = penalty(p, it.x, c.L_A / beta1).f
            g = smoothed_dual(p, it.y, beta1, 0.0).value
            worst = max(worst, f - g)
    return worst <= 1e-9, f"max f - g at the exact start: {worst:.3e}"


@timed(3)
def criterion_3():
    rng = np.random.default_rng(0)
    lower_bad = upper_bad = root_bad = 0
    first_lower = None
    for astar in (0.05, 0.25, 0.5, 0.75, 1.0):
        paths = {"constant a*": lambda k: astar, "constant 1": lambda k: 1.0,
                 "uniform": lambda k: rng.uniform(astar, 1.0)}
        for name, path in paths.items():
            t = GOLDEN_TAU0
            for k in range(1, 10_001):
                a = path(k)
                tn = update_tau_dual(t, a)
                c = (1 - a * t) * t * t
                if abs(tn * tn / (1 - tn) - c) > 1e-12 * c:
                    root_bad += 1
                t = tn
                lo, hi = tau_bounds(k, GOLDEN_TAU0, astar)
                if t < lo - 1e-12:
                    lower_bad += 1
                    first_lower = first_lower or (astar, name, k)
                if t > hi + 1e-12:
                    upper_bad += 1
    ok = lower_bad == upper_bad == root_bad == 0
    detail = (f"upper violations {upper_bad}, root identity violations {root_bad}, "
              f"lower violations {lower_bad}")
    if first_lower:
        detail += (f" (first at a*={first_lower[0]}, path {first_lower[1]!r}, k={first_lower[2]};"
                   " the lower envelope needs every alpha below 1/(1+tau0))")
    return ok, detail


@timed(4)
def criterion_4():
    worst = 0.0
    problems = [scalar_family(s) for s in range(5)] + [generate_nonsmooth(40),
                                                        generate_basis_pursuit(20, 64, 0)]
    for p in problems:
        rep = run_algorithm1(p, SolveOptions(maxiter=300, check_stopping=False))
        b1, b2, tau = rep.column("beta1"), rep.column("beta2"), rep.column("tau")
        ref = b1[0] * b2[0] * (1 - tau[0]) / tau[0] ** 2
        rel = np.abs(b1[:-1] * b2[1:] - ref * tau[:-1] ** 2) / (ref * tau[:-1] ** 2)
        worst = max(worst, float(rel.max()))
    return worst <= 1e-12, f"max relative error {worst:.3e} over 7 traces"


@timed(5)
def criterion_5():
    bad = [(alg, name) for alg, name, rep in invariant_traces()
           if np.any(np.diff(rep.column("delta")) > 0)]
    return not bad, f"traces with an increase: {len(bad)} of 40"


@timed(6)
def criterion_6():
    worst_fd = worst_psi = 0.0
    h = 1e-6
    rng = np.random.default_rng(6)
    for s in range(4):
        p = scalar_family(s)
        beta1 = 0.5
        for _ in range(5):
            y = rng.standard_normal(p.m)
            grad = smoothed_dual(p, y, beta1, 0.0).grad
            fd = np.array([(smoothed_dual(p, y + h * e, beta1, 0.0).value
                            - smoothed_dual(p, y - h * e, beta1, 0.0).value) / (2 * h)
                           for e in np.eye(p.m)])
            worst_fd = max(worst_fd, np.linalg.norm(grad - fd) / (1 + np.linalg.norm(grad)))
            x = rng.uniform(-3, 3, p.n)
            beta2 = float(rng.uniform(0.01, 10))
            r = p.residual(x)
            ystar = r / beta2
            var = float(r @ ystar) - 0.5 * beta2 * float(ystar @ ystar)
            worst_psi = max(worst_psi, abs(penalty(p, x, beta2).psi - var) / max(1.0, abs(var)))
    ok = worst_fd <= 1e-5 and worst_psi <= 1e-10
    return ok, f"FD gradient error {worst_fd:.2e} at 20 points; psi error {worst_psi:.2e}"


@timed(7)
def criterion_7():
    worst_feas = worst_gap = -np.inf
    for seed in range(5):
        rep, R = reference_run(seed)
        c = rep.constants
        k = rep.column("k")
        b1, b2, d = rep.column("beta1"), rep.column("beta2"), rep.column("delta")
        beta0 = b1[0]
        # explicit stand-in for the unspecified constant: the largest delta_k / beta1^k
        c0 = beta0 * float(np.max(d / b1))
        Cf = ((3 - math.sqrt(5)) * c.L_A / beta0 * R
              + 0.5 * (math.sqrt(5) - 1) * math.sqrt(c.L_A * (c.D_X + c0 / beta0)))
        env = Cf / (0.25 * (math.sqrt(5) - 1) * (1 + c.alpha_star) * k + 1)
        worst_feas = max(worst_feas, float(np.max(rep.column("feas") / env)))
        gap = rep.column("phi") - rep.column("gval") - d - b1 * c.D_X
        worst_gap = max(worst_gap, float(np.max(gap)))
    ok = worst_feas <= 1 and worst_gap <= 0
    return ok, (f"max feas/envelope {worst_feas:.3f}; max (phi - g) - (delta + beta1 D_X) "
                f"{worst_gap:.3e} over 5 QPs x 1e5 iterations")


@timed(8)
def criterion_8():
    _, R = reference_run(0)
    rep = run_fixed_beta1(envelope_qp(0), 0.05, SolveOptions(check_stopping=False, R_ref=R))
    e = rep.extra
    gap = abs(rep.final.phi - rep.final.gval)
    ok = rep.iterations == 41 and e["feas_ok"] and e["gap_ok"]
    return ok, (f"k = {rep.iterations}; feas {rep.final.feas:.3e} <= {e['feas_bound']:.3e}; "
                f"|phi - g| {gap:.3e} <= {e['gap_bound']:.3e}")


@timed(9)
def criterion_9():
    opts = SolveOptions(maxiter=20_000, beta0=BASIS_PURSUIT_BETA0)
    wins, counts = {}, {}
    for sr in (0.25, 0.75):
        rows = []
        for seed in range(5):
            p = generate_basis_pursuit(50, 128, seed, shift_ratio=sr)
            r1, r2 = run_algorithm1(p, opts), run_algorithm2(p, opts)
            n1 = r1.iterations if r1.status == "converged" else math.inf
            n2 = r2.iterations if r2.status == "converged" else math.inf
            rows.append((n1, n2))
        counts[sr] = rows
        wins[sr] = sum(n2 < n1 for n1, n2 in rows) if sr == 0.25 else \
            sum(n1 < n2 for n1, n2 in rows)
    ok = wins[0.25] >= 3 and wins[0.75] >= 3
    detail = (f"a*=0.25: Alg2 fewer in {wins[0.25]}/5 {counts[0.25]}; "
              f"a*=0.75: Alg1 fewer in {wins[0.75]}/5 {counts[0.75]}")
    return ok, detail


@timed(10)
def criterion_10():
    p = generate_nonsmooth(1000)
    reps = [d(p, SolveOptions(maxiter=10_000)) for d in (run_algorithm1, run_algorithm2)]
    ok = all(r.status == "converged" for r in reps)
    return ok, "iterations " + ", ".join(f"{r.algorithm}: {r.iterations} ({r.status})"
                                         for r in reps)


@timed(11)
def criterion_11():
    p, _, f_ref = tiny_qp(0)
    tight = SolveOptions(maxiter=20_000, tol_feas=1e-8, tol_gap=1e-8, tol_stag=1e-10)
    errs = {v: abs(run_baseline(p, v, tight).final.phi - f_ref) for v in sorted(ADMM_VARIANTS)}
    rep = run_algorithm1(p, SolveOptions(maxiter=100_000, tol_feas=1e-5, tol_gap=1e-6,
                                         tol_stag=1e-9))
    errs["idda1"] = abs(rep.final.phi - f_ref) if rep.status == "converged" else math.inf
    ok = max(errs.values()) <= 1e-4
    return ok, "objective errors vs KKT " + ", ".join(f"{k}: {v:.1e}" for k, v in errs.items())


@timed(12)
def criterion_12():
    def rec(s, p, it, status="converged"):
        return RunRecord(solver=s, problem=p, status=status, iterations=it, time=float(it))

    records = [rec("A", "p1", 10), rec("B", "p1", 20),
               rec("A", "p2", 60), rec("B", "p2", 15),
               rec("A", "p3", 8), rec("B", "p3", 5, "maxiter")]
    # log2 ratios: A = (0, 2, 0), B = (1, 0, inf)
    expected = {"A": {0.0: 2 / 3, 1.0: 2 / 3, 2.0: 1.0},
                "B": {0.0: 1 / 3, 1.0: 2 / 3, 2.0: 2 / 3}}
    curves = {c.solver: c for c in performance_profile(records)}
    got = {s: {t: curves[s].at(t) for t in expected[s]} for s in expected}
    taus_ok = all(np.array_equal(c.taus, [0.0, 1.0, 2.0]) for c in curves.values())
    return got == expected and taus_ok, f"rho values {got}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12]


@pytest.mark.parametrize("check", CRITERIA, ids=lambda f: f.__name__)
def test_acceptance(check):
    assert check()


if __name__ == "__main__":
    results = [check() for check in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
