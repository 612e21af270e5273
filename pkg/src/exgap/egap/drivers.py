"""Full solve loops: switching-free two-dual-step method, primal-dual switching
method, and the fixed-smoothing variant."""

import logging
import math
import time

import numpy as np

from .._parallel import tree_sum
from ..bench.stopping import rpfgap, stopping_check
from ..model.problem import compute_constants, validate
from ..subprob import ConfigurationError, has_closed_forms, phi_parts
from ..smooth import evaluate_dual
from . import schedule as sch
from .schemes import check_dual_condition, check_primal_condition, init_point, make_context, \
    scheme_Sd, scheme_Sp
from .state import (BETA2_FLOOR, CONVERGED, MAXITER, NUMERICAL_FAILURE, SUBPROBLEM_FAILURE,
                    TAU_FLOOR, SchedulerState, SolveOptions, SolveReport, TraceRow)

log = logging.getLogger(__name__)


class _Run:
    """Bookkeeping shared by the three drivers: trace rows, timing, termination."""

    def __init__(self, problem, opts, algorithm):
        self.opts = SolveOptions() if opts is None else opts
        if not problem.validated:
            validate(problem)
        self.problem = problem
        self.consts = compute_constants(problem)
        if not self.consts.L_A > 0:
            raise ConfigurationError("coupling matrix is zero; nothing to dualize")
        self.exact = self.opts.eps_tilde == 0
        if self.exact and not has_closed_forms(problem):
            raise ConfigurationError(
                "exact mode (eps_tilde = 0) needs a closed-form solver for every component")
        self.ctx = make_context(problem, n_jobs=self.opts.n_jobs, budget=self.opts.inner_budget)
        self.algorithm = algorithm
        self.trace = []
        self.b_norm = float(np.linalg.norm(problem.b))
        self.t0 = time.perf_counter()

    def epsbar(self, state, factor):
        return sch.requested_accuracy(state, factor, self.opts.eps_floor, self.exact)

    def monitor(self, it, state):
        return evaluate_dual(self.problem, it.y, state.beta1,
                             self.ctx.primal(it.y, state.beta1, state.epsbar))

    def row(self, state, it, mon, scheme, flags):
        feas = it.feas
        phi = tree_sum(phi_parts(self.problem, it.x))
        f = phi + feas * feas / (2.0 * state.beta2)
        flags = tuple(flags)
        if not mon.certified.all():
            flags += ("uncertified_monitor",)
        r = TraceRow(k=state.k, tau=state.tau, beta1=state.beta1, beta2=state.beta2,
                     delta=state.delta, epsbar=state.epsbar, feas=feas,
                     rpfgap=rpfgap(feas, self.b_norm), phi=phi, sgap=f - mon.value,
                     ms=1e3 * (time.perf_counter() - self.t0), fval=f, gval=mon.value,
                     scheme=scheme, flags=flags, extra={"alpha": state.alpha})
        self.trace.append(r)
        if self.opts.callback is not None:
            self.opts.callback(state.k, state, it)
        return r

    def should_stop(self):
        if not self.opts.check_stopping:
            return False
        o = self.opts
        return stopping_check(self.trace, o.tol_feas, o.tol_gap, o.tol_stag, o.window,
                              use_gap=o.use_gap).stop

    def finish(self, status, it, message="", **extra):
        if self.ctx.pool is not None:
            self.ctx.pool.close()
        if self.opts.trace_path is not None:
            from .state import write_trace_csv
            write_trace_csv(self.trace, self.opts.trace_path)
        log.info("%s finished: %s after %d iterations", self.algorithm, status,
                 len(self.trace) - 1)
        return SolveReport(status=status, trace=self.trace, x=it.x, y=it.y,
                           iterations=len(self.trace) - 1, algorithm=self.algorithm,
                           message=message, constants=self.consts, extra=extra)


def _finite(it):
    return bool(np.all(np.isfinite(it.x)) and np.all(np.isfinite(it.y)))


def _floors(tau, beta2, flags):
    if tau < TAU_FLOOR:
        tau = TAU_FLOOR
        flags.append("tau_floor")
    if beta2 < BETA2_FLOOR:
        beta2 = BETA2_FLOOR
        flags.append("beta2_floor")
    return tau, beta2


def _start(run, tau0):
    o, c = run.opts, run.consts
    beta1 = o.beta0
    beta2 = c.L_A / beta1
    eps0 = 0.0 if run.exact else max(o.eps_tilde / sch.compute_C0(beta1, c), o.eps_floor)
    it, d0, _ = init_point(run.problem, beta1, eps0, ctx=run.ctx)
    delta = 0.0 if run.exact else max(o.eps_tilde, d0)
    state = SchedulerState(k=0, tau=tau0, beta1=beta1, beta2=beta2, delta=delta, epsbar=eps0,
                           alpha=c.alpha_star)
    return it, state


def _dual_step(run, it, state, flags):
    """Two-dual-step update plus the parameter recursions; returns new (it, state)."""
    c, o = run.consts, run.opts
    if not check_dual_condition(state, c.L_A) and not any("floor" in f for f in flags):
        raise AssertionError(f"step-size coupling violated at k={state.k}")
    step = scheme_Sd(run.problem, it, state, ctx=run.ctx, check=False)
    e = sch.eta(state, float(np.linalg.norm(it.y)), step.eps, run.problem.sigmas, c)
    t = state.tau
    delta = sch.next_delta(state.delta, t, e)
    alpha = step.alpha
    beta1 = (1.0 - alpha * t) * state.beta1
    beta2 = (1.0 - t) * state.beta2
    new_flags = []
    tau, beta2 = _floors(sch.update_tau_dual(t, alpha), beta2, new_flags)
    if not step.certified.all():
        new_flags.append("uncertified")
    return step, new_flags, SchedulerState(k=state.k + 1, tau=tau, beta1=beta1, beta2=beta2,
                                           delta=delta, epsbar=state.epsbar, alpha=alpha)


def run_algorithm1(problem, opts=None):
    """Inexact decomposition with two dual steps per iteration.

    Each iteration requests subproblem accuracy ``tau delta / Q_k``, takes a
    two-dual-step update at the current smoothness pair and then shrinks
    ``beta1`` by ``1 - alpha tau`` and ``beta2`` by ``1 - tau``.
    """
    run = _Run(problem, opts, "idda1")
    o, c = run.opts, run.consts
    it, state = _start(run, sch.GOLDEN_TAU0)
    flags = []
    while True:
        q = sch.compute_Qk(state, float(np.linalg.norm(it.y)), c)
        state = state.evolve(epsbar=run.epsbar(state, q))
        mon = run.monitor(it, state)
        run.row(state, it, mon, "Sd", flags)
        if run.should_stop():
            return run.finish(CONVERGED, it)
        if state.k >= o.maxiter:
            return run.finish(MAXITER, it)
        step, flags, state = _dual_step(run, it, state, flags)
        if o.strict and "uncertified" in flags:
            return run.finish(SUBPROBLEM_FAILURE, it, "inner solver missed its accuracy target")
        if not _finite(step.iterate):
            return run.finish(NUMERICAL_FAILURE, it, "non-finite iterate")
        it = step.iterate


def run_algorithm2(problem, opts=None):
    """Inexact decomposition switching between primal and dual steps.

    Even iterations take a two-primal-step update (``beta2`` shrinks first,
    then ``beta1``, and ``tau <- tau/(1+tau)``); odd iterations a two-dual-step
    update with the same recursions as :func:`run_algorithm1`.
    """
    run = _Run(problem, opts, "idda2")
    o, c = run.opts, run.consts
    it, state = _start(run, sch.PRIMAL_TAU0)
    flags = []
    while True:
        primal = state.k % 2 == 0
        if primal:
            factor = sch.compute_Rk(state, c)
        else:
            factor = sch.compute_Qk(state, float(np.linalg.norm(it.y)), c)
        state = state.evolve(epsbar=run.epsbar(state, factor))
        mon = run.monitor(it, state)
        run.row(state, it, mon, "Sp" if primal else "Sd", flags)
        if run.should_stop():
            return run.finish(CONVERGED, it)
        if state.k >= o.maxiter:
            return run.finish(MAXITER, it)
        if primal:
            t = state.tau
            new_flags = []
            if not check_primal_condition(state, c.L_A):
                new_flags.append("primal_condition")
            beta2 = (1.0 - t) * state.beta2
            step = scheme_Sp(run.problem, it, state, max(beta2, BETA2_FLOOR), ctx=run.ctx,
                             primal_batch=_batch_of(mon))
            x = sch.xi(state, mon.eps, step.eps, step.mu, run.problem.sigmas, c)
            delta = sch.next_delta(state.delta, t, x)
            tau, beta2 = _floors(sch.update_tau_primal(t), beta2, new_flags)
            if not step.certified.all():
                new_flags.append("uncertified")
            flags = new_flags
            state = SchedulerState(k=state.k + 1, tau=tau, beta1=(1.0 - t) * state.beta1,
                                   beta2=beta2, delta=delta, epsbar=state.epsbar,
                                   alpha=state.alpha)
        else:
            step, flags, state = _dual_step(run, it, state, flags)
        if o.strict and "uncertified" in flags:
            return run.finish(SUBPROBLEM_FAILURE, it, "inner solver missed its accuracy target")
        if not _finite(step.iterate):
            return run.finish(NUMERICAL_FAILURE, it, "non-finite iterate")
        it = step.iterate


def _batch_of(mon):
    from ..subprob import BatchResult
    return BatchResult(x=mon.x, eps=mon.eps, certified=mon.certified,
                       iterations=mon.iterations)


def fixed_beta1_constants(constants, R):
    """Feasibility and gap constants ``C_f^0, C_d^0`` of the fixed-smoothing bound."""
    c = constants
    s = math.sqrt(c.L_A)
    base = 2.0 * R + math.sqrt(2.0 * c.D_X)
    return s * base, s * max(c.D_X, base)


def run_fixed_beta1(problem, eps_f, opts=None):
    """Two-dual-step method with ``beta1 = sqrt(L_A) eps_f`` held fixed.

    Runs ``floor(2/eps_f) + 1`` iterations unless the stopping rule fires
    first. When ``opts.R_ref`` is given, ``report.extra`` holds the bounds
    ``C_f^0 eps_f`` and ``C_d^0 eps_f`` and whether the final iterate meets them.
    """
    if not eps_f > 0:
        raise ValueError(f"eps_f must be positive, got {eps_f}")
    run = _Run(problem, opts, "fixed-beta1")
    o, c = run.opts, run.consts
    kbar = int(math.floor(2.0 / eps_f)) + 1
    beta1 = math.sqrt(c.L_A) * eps_f
    beta2 = c.L_A / beta1
    eps0 = 0.0 if run.exact else max(o.eps_tilde / sch.compute_C0(beta1, c), o.eps_floor)
    it, d0, _ = init_point(problem, beta1, eps0, ctx=run.ctx)
    delta = 0.0 if run.exact else max(o.eps_tilde, d0)
    state = SchedulerState(k=0, tau=sch.GOLDEN_TAU0, beta1=beta1, beta2=beta2, delta=delta,
                           epsbar=eps0, alpha=0.0)
    flags = []
    status = MAXITER
    while True:
        q = sch.compute_Qk(state, float(np.linalg.norm(it.y)), c)
        state = state.evolve(epsbar=run.epsbar(state, q))
        mon = run.monitor(it, state)
        run.row(state, it, mon, "Sd", flags)
        if run.should_stop():
            status = CONVERGED
            break
        if state.k >= kbar:
            break
        t = state.tau
        step = scheme_Sd(problem, it, state, ctx=run.ctx, check=False)
        e = sch.eta(state, float(np.linalg.norm(it.y)), step.eps, problem.sigmas, c)
        flags = []
        tau, b2 = _floors(sch.update_tau_fixed(t), (1.0 - t) * state.beta2, flags)
        if not step.certified.all():
            flags.append("uncertified")
        state = SchedulerState(k=state.k + 1, tau=tau, beta1=beta1, beta2=b2,
                               delta=sch.next_delta(state.delta, t, e),
                               epsbar=state.epsbar, alpha=0.0)
        if o.strict and "uncertified" in flags:
            return run.finish(SUBPROBLEM_FAILURE, it, "inner solver missed its accuracy target")
        if not _finite(step.iterate):
            return run.finish(NUMERICAL_FAILURE, it, "non-finite iterate")
        it = step.iterate
    extra = {"kbar": kbar, "beta1": beta1}
    if o.R_ref is not None:
        cf, cd = fixed_beta1_constants(c, o.R_ref)
        last = run.trace[-1]
        extra.update(feas_bound=cf * eps_f, gap_bound=cd * eps_f,
                     feas_ok=last.feas <= cf * eps_f,
                     gap_ok=abs(last.phi - last.gval) <= cd * eps_f)
    return run.finish(status, it, **extra)


def run(problem, algorithm="idda1", opts=None, **kw):
    """Dispatch on the algorithm id used by the command line."""
    if algorithm == "idda1":
        return run_algorithm1(problem, opts)
    if algorithm == "idda2":
        return run_algorithm2(problem, opts)
    if algorithm == "fixed-beta1":
        return run_fixed_beta1(problem, kw.get("eps_f", 0.05), opts)
    from .. import baselines
    return baselines.run_baseline(problem, algorithm, opts)


__all__ = ["run_algorithm1", "run_algorithm2", "run_fixed_beta1", "fixed_beta1_constants", "run"]
