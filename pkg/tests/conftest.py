import numpy as np
import pytest

from exgap.model import (AbsObjective, Box, ComponentSpec, Problem, QuadraticObjective,
                         WholeSpace, ZeroObjective, validate)


def scalar_problem(**kw):
    """``phi = 0``, ``X = R`` (radius 10), ``A = [1]``, ``b = 0``, ``x^c = 0``, ``sigma = 1``."""
    comp = ComponentSpec(ZeroObjective(), WholeSpace(), np.eye(1), np.zeros(1), radius=10.0, **kw)
    return validate(Problem([comp], 1))


def box_scalar_problem(lo=-1.0, hi=1.0):
    comp = ComponentSpec(ZeroObjective(), Box(lo, hi), np.eye(1), np.zeros(1))
    return validate(Problem([comp], 1))


def scalar_family(seed, M=None, m=None):
    """Random instance of weighted ``|x_i - a_i|`` blocks on boxes with scalar variables.

    Every component has a closed-form subproblem, so exact-mode runs and
    the true (unsmoothed) dual are available. The coupling constraint is
    consistent with an interior point.
    """
    rng = np.random.default_rng(seed)
    M = int(rng.integers(2, 12)) if M is None else M
    m = int(rng.integers(1, 4)) if m is None else m
    x0 = rng.uniform(-1.0, 1.0, size=M)
    comps = []
    for i in range(M):
        A = rng.uniform(-1.0, 1.0, size=(m, 1))
        if rng.random() < 0.8:
            obj = AbsObjective(rng.uniform(0.1, 3.0), rng.uniform(-2.0, 2.0))
        else:
            obj = ZeroObjective()
        comps.append(ComponentSpec(obj, Box(-3.0, 3.0), A, A @ x0[i:i + 1],
                                   sigma=rng.uniform(0.5, 2.0),
                                   center=rng.uniform(-1.0, 1.0, size=1)))
    return validate(Problem(comps, m, name=f"scalar-{seed}"))


def true_dual(problem, y):
    """Unsmoothed dual ``g(y)`` of a scalar box instance, by enumerating candidate minimizers."""
    total = 0.0
    for i, comp in enumerate(problem.components):
        lo, hi = comp.feasible_set.bounds(1)
        a_ty = float((problem.mats[i].T @ y)[0])
        cands = [lo[0], hi[0]]
        if isinstance(comp.objective, AbsObjective):
            cands.append(float(np.clip(comp.objective.shift[0], lo[0], hi[0])))
        vals = [comp.objective.value(np.array([c])) + a_ty * c for c in cands]
        total += min(vals) - float(y @ problem.bs[i])
    return total


def tiny_qp(seed=0, M=2, n_i=2, m=1):
    """Strongly convex QP on whole spaces plus its KKT reference solution."""
    rng = np.random.default_rng(seed)
    comps, Qs, qs, As = [], [], [], []
    x0 = rng.standard_normal(M * n_i)
    for i in range(M):
        R = rng.standard_normal((n_i, n_i))
        Q = R @ R.T + 0.5 * np.eye(n_i)
        q = rng.standard_normal(n_i)
        A = rng.standard_normal((m, n_i))
        comps.append(ComponentSpec(QuadraticObjective(Q, q), WholeSpace(), A,
                                   A @ x0[i * n_i:(i + 1) * n_i], radius=20.0))
        Qs.append(Q)
        qs.append(q)
        As.append(A)
    problem = validate(Problem(comps, m, name=f"tinyqp-{seed}"))
    n = M * n_i
    Qb = np.zeros((n, n))
    for i, Q in enumerate(Qs):
        Qb[i * n_i:(i + 1) * n_i, i * n_i:(i + 1) * n_i] = Q
    A = np.hstack(As)
    K = np.block([[Qb, A.T], [A, np.zeros((m, m))]])
    sol = np.linalg.solve(K, np.concatenate([-np.concatenate(qs), problem.b]))
    x = sol[:n]
    return problem, x, float(0.5 * x @ Qb @ x + np.concatenate(qs) @ x)


@pytest.fixture
def unit_problem():
    return scalar_problem()
