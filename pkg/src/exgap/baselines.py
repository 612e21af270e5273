"""Comparison solvers: parallel ADMM variants and fixed-smoothing fast dual ascent.

Both consume the same :class:`~exgap.model.Problem` and the same stopping
rule as the excessive-gap drivers, and report through :class:`SolveReport`.
"""

import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from ._parallel import tree_sum
from .bench.stopping import rpfgap, stopping_check
from .egap.schemes import make_context
from .egap.state import (CONVERGED, MAXITER, NUMERICAL_FAILURE, SUBPROBLEM_FAILURE,
                         SolveOptions, SolveReport, TraceRow, write_trace_csv)
from .model.objectives import QuadraticObjective
from .model.problem import compute_constants, validate
from .model.sets import WholeSpace
from .smooth import dual_lipschitz, evaluate_dual
from .subprob import phi_parts, solve_prox

log = logging.getLogger(__name__)

# accuracy of inner solves in the baselines (fixed rather than scheduled)
BASELINE_INNER_EPS = 1e-8

ADMM_VARIANTS = {
    "admm-v1": {"rho0": 1.0, "rule": "residual_balancing"},
    "admm-v2": {"rho0": 1000.0, "rule": "residual_balancing"},
    "admm-v3": {"rho0": 1000.0, "rule": "fixed"},
}


@dataclass
class AdmmConfig:
    """Penalty schedule of the parallel ADMM.

    ``rule="residual_balancing"`` multiplies (divides) ``rho`` by ``scale``
    when the primal residual exceeds ``mu`` times the dual residual (and
    vice versa); ``rule="fixed"`` never changes ``rho``.
    """

    rho0: float = 1.0
    rule: str = "residual_balancing"
    mu: float = 10.0
    scale: float = 2.0
    options: SolveOptions = None

    def __post_init__(self):
        if not self.rho0 > 0:
            raise ValueError(f"rho0 must be positive, got {self.rho0}")
        if self.rule not in ("residual_balancing", "fixed"):
            raise ValueError(f"unknown penalty rule {self.rule!r}")
        if not (self.mu > 1 and self.scale > 1):
            raise ValueError("balancing constants mu and scale must exceed 1")
        if self.options is None:
            self.options = SolveOptions()

    @classmethod
    def variant(cls, name, options=None):
        if name not in ADMM_VARIANTS:
            raise ValueError(f"unknown ADMM variant {name!r}")
        return cls(options=options, **ADMM_VARIANTS[name])


@dataclass
class PcbdmConfig:
    """Fixed smoothing ``beta1``; None selects ``eps_p max(1, |phi(x_c)|) / D_X``."""

    beta1: float = None
    eps_p: float = None
    options: SolveOptions = None

    def __post_init__(self):
        if self.options is None:
            self.options = SolveOptions()
        if self.eps_p is None:
            self.eps_p = self.options.tol_feas
        if self.beta1 is not None and not self.beta1 > 0:
            raise ValueError(f"beta1 must be positive, got {self.beta1}")
        if not self.eps_p > 0:
            raise ValueError("eps_p must be positive")


def pcbdm_beta1(eps_p, phi0, D_X):
    """Smoothing used by the fixed-smoothing baseline."""
    return eps_p * max(1.0, abs(phi0)) / D_X


def _row(k, feas, b_norm, phi, t0, **kw):
    nan = float("nan")
    base = dict(tau=nan, beta1=nan, beta2=nan, delta=nan, epsbar=nan, sgap=nan)
    base.update({key: kw.pop(key) for key in list(kw) if key in base})
    return TraceRow(k=k, feas=feas, rpfgap=rpfgap(feas, b_norm), phi=phi,
                    ms=1e3 * (time.perf_counter() - t0), **base, **kw)


def _stop(rows, o):
    if not o.check_stopping:
        return False
    return stopping_check(rows, o.tol_feas, o.tol_gap, o.tol_stag, o.window,
                          use_gap=o.use_gap).stop


def _report(status, trace, x, y, name, o, ctx, consts, message="", **extra):
    if ctx.pool is not None:
        ctx.pool.close()
    if o.trace_path is not None:
        write_trace_csv(trace, o.trace_path)
    log.info("%s finished: %s after %d iterations", name, status, len(trace) - 1)
    return SolveReport(status=status, trace=trace, x=x, y=y, iterations=len(trace) - 1,
                       algorithm=name, message=message, constants=consts, extra=extra)


class _ExactBlock:
    """Cached factorization for a quadratic block on the whole space."""

    def __init__(self, Q, q, A):
        self.Q, self.q, self.A = Q, q, A
        self.rho = None

    def solve(self, rho, v):
        if rho != self.rho:
            H = self.Q + rho * (self.A.T @ self.A)
            try:
                self.chol = np.linalg.cholesky(H)
                self.H = None
            except np.linalg.LinAlgError:
                self.chol, self.H = None, H
            self.rho = rho
        rhs = rho * (self.A.T @ v) - self.q
        if self.chol is not None:
            return np.linalg.solve(self.chol.T, np.linalg.solve(self.chol, rhs))
        return np.linalg.lstsq(self.H, rhs, rcond=None)[0]


def run_admm(problem, cfg=None, name="admm"):
    """Parallel ADMM on the sharing form of the coupled problem.

    With ``z_i = A_i x_i`` the blocks are updated in parallel by
    ``x_i <- argmin phi_i + rho/2 ||A_i x - v_i||^2`` over ``X_i``, where
    ``v_i = A_i x_i - mean(Ax) + b/M - u``; then ``u += mean(Ax) - b/M``.
    Quadratic blocks on the whole space are solved exactly; the others take a
    linearized (prox-linear) step solved by the package's subproblem solvers.
    The multiplier of ``sum_i A_i x_i = b`` is reported as ``rho * u``.
    """
    cfg = AdmmConfig() if cfg is None else cfg
    o = cfg.options
    if not problem.validated:
        validate(problem)
    consts = compute_constants(problem)
    ctx = make_context(problem, n_jobs=o.n_jobs, budget=o.inner_budget)
    M, m = problem.M, problem.m
    off = problem.offsets
    mats = problem.mats
    bM = problem.b / M
    exact = {}
    for i, c in enumerate(problem.components):
        if isinstance(c.objective, QuadraticObjective) and isinstance(c.feasible_set, WholeSpace):
            A = mats[i].toarray() if hasattr(mats[i], "toarray") else mats[i]
            exact[i] = _ExactBlock(c.objective.dense_Q, c.objective.q, A)
    norms2 = consts.norms_A ** 2
    x = problem.center.copy()
    Ax = np.stack([mats[i] @ x[off[i]:off[i + 1]] for i in range(M)])
    u = np.zeros(m)
    rho = float(cfg.rho0)
    b_norm = float(np.linalg.norm(problem.b))
    t0 = time.perf_counter()
    trace = []

    def record(k, res_p, res_d, flags=()):
        feas = float(np.linalg.norm(tree_sum(Ax) - problem.b))
        phi = tree_sum(phi_parts(problem, x))
        trace.append(_row(k, feas, b_norm, phi, t0, flags=tuple(flags),
                          scheme="admm", extra={"rho": rho, "primal_res": res_p,
                                                "dual_res": res_d}))

    record(0, float(np.linalg.norm(tree_sum(Ax) - problem.b)), 0.0)
    k = 0
    while True:
        if _stop(trace, o):
            return _report(CONVERGED, trace, x, rho * u, name, o, ctx, consts, rho=rho)
        if k >= o.maxiter:
            return _report(MAXITER, trace, x, rho * u, name, o, ctx, consts, rho=rho)
        mean = tree_sum(Ax) / M
        flags = []

        def block(i):
            s, e = off[i], off[i + 1]
            v = Ax[i] - mean + bM - u
            if i in exact:
                return exact[i].solve(rho, v), True
            xi = x[s:e]
            mu = rho * norms2[i]
            if mu <= 0:
                return xi, True
            l = rho * (mats[i].T @ (Ax[i] - v))
            xn, _, _, ok, _ = solve_prox(problem, i, l, mu, xi, BASELINE_INNER_EPS,
                                         budget=ctx.budget, warm=xi)
            return xn, ok

        results = ctx.pool.map(block, range(M)) if ctx.pool is not None else \
            [block(i) for i in range(M)]
        x_new = np.empty_like(x)
        for i, (xi, ok) in enumerate(results):
            x_new[off[i]:off[i + 1]] = xi
            if not ok:
                flags.append("uncertified")
        Ax_new = np.stack([mats[i] @ x_new[off[i]:off[i + 1]] for i in range(M)])
        mean_new = tree_sum(Ax_new) / M
        u = u + mean_new - bM
        d = (Ax_new - mean_new) - (Ax - mean)
        res_d = rho * float(np.sqrt(np.sum(d * d)))
        res_p = float(M * np.linalg.norm(mean_new - bM))
        x, Ax = x_new, Ax_new
        k += 1
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(u))):
            record(k, res_p, res_d, flags)
            return _report(NUMERICAL_FAILURE, trace, x, rho * u, name, o, ctx, consts,
                           "non-finite iterate")
        if o.strict and flags:
            record(k, res_p, res_d, flags)
            return _report(SUBPROBLEM_FAILURE, trace, x, rho * u, name, o, ctx, consts)
        record(k, res_p, res_d, flags)
        if cfg.rule == "residual_balancing":
            if res_p > cfg.mu * res_d:
                rho *= cfg.scale
                u /= cfg.scale
            elif res_d > cfg.mu * res_p:
                rho /= cfg.scale
                u *= cfg.scale


def run_pcbdm(problem, cfg=None, name="pcbdm"):
    """Fast gradient ascent on the smoothed dual with fixed ``beta1``.

    Uses step ``1/L^g(beta1)``, a monotone acceleration (a candidate that
    decreases the surrogate dual value is not accepted as the anchor) and
    reports the weighted average of the subproblem minimizers as primal
    iterate. The stopping rule is the shared one without the surrogate-gap
    test, since no penalty parameter is maintained.
    """
    cfg = PcbdmConfig() if cfg is None else cfg
    o = cfg.options
    if not problem.validated:
        validate(problem)
    consts = compute_constants(problem)
    ctx = make_context(problem, n_jobs=o.n_jobs, budget=o.inner_budget)
    phi0 = tree_sum(phi_parts(problem, problem.center))
    beta1 = cfg.beta1 if cfg.beta1 is not None else pcbdm_beta1(cfg.eps_p, phi0, consts.D_X)
    Lg = dual_lipschitz(beta1, consts)
    b_norm = float(np.linalg.norm(problem.b))
    t0 = time.perf_counter()
    eps = BASELINE_INNER_EPS

    def dual(y):
        return evaluate_dual(problem, y, beta1, ctx.primal(y, beta1, eps))

    y = np.zeros(problem.m)
    ev = dual(y)
    g_best = ev.value
    w, t = y.copy(), 1.0
    ev_w = ev
    xbar = ev.x.copy()
    wsum = 1.0
    trace = []

    def record(k, flags=()):
        r = problem.residual(xbar)
        feas = float(np.linalg.norm(r))
        trace.append(_row(k, feas, b_norm, tree_sum(phi_parts(problem, xbar)), t0,
                          tau=1.0 / t, beta1=beta1, gval=g_best, flags=tuple(flags),
                          scheme="pcbdm"))

    record(0)
    k = 0
    opts = SolveOptions(**{**o.__dict__, "use_gap": False})
    while True:
        if _stop(trace, opts):
            return _report(CONVERGED, trace, xbar, y, name, o, ctx, consts, beta1=beta1)
        if k >= o.maxiter:
            return _report(MAXITER, trace, xbar, y, name, o, ctx, consts, beta1=beta1)
        z = w + ev_w.grad / Lg
        ev_z = dual(z)
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y_old = y
        if ev_z.value >= g_best:
            y, g_best = z, ev_z.value
        w = y + (t / t_new) * (z - y) + ((t - 1.0) / t_new) * (y - y_old)
        # primal recovery: average of minimizers at the gradient points
        xbar = (wsum * xbar + t * ev_w.x) / (wsum + t)
        wsum += t
        t = t_new
        ev_w = dual(w)
        k += 1
        flags = () if ev_w.certified.all() else ("uncertified",)
        if not np.all(np.isfinite(w)):
            record(k, flags)
            return _report(NUMERICAL_FAILURE, trace, xbar, y, name, o, ctx, consts,
                           "non-finite iterate")
        record(k, flags)


def run_baseline(problem, algorithm, opts=None):
    """Dispatch a baseline by command-line id."""
    opts = SolveOptions() if opts is None else opts
    if algorithm in ADMM_VARIANTS:
        return run_admm(problem, AdmmConfig.variant(algorithm, opts), name=algorithm)
    if algorithm == "pcbdm":
        return run_pcbdm(problem, PcbdmConfig(options=opts))
    raise ValueError(f"unknown algorithm {algorithm!r}")


__all__ = ["AdmmConfig", "PcbdmConfig", "ADMM_VARIANTS", "run_admm", "run_pcbdm",
           "run_baseline", "pcbdm_beta1", "BASELINE_INNER_EPS"]
