"""Starting point and the two excessive-gap update schemes."""

from dataclasses import dataclass, field

import numpy as np

from .._parallel import ComponentPool
from ..model.problem import compute_constants
from ..subprob import DEFAULT_BUDGET, solve_batch, solve_primal_batch
from ..smooth import dual_lipschitz
from .schedule import initial_delta
from .state import Iterate


class SchemeViolation(AssertionError):
    """The step-size/smoothness coupling required by a scheme does not hold."""


@dataclass
class Context:
    """Per-solve resources shared by the scheme steps.

    Holds the problem constants, the worker pool, the inner iteration budget
    and warm starts for the iterative subproblem solvers.
    """

    problem: object
    constants: object = None
    pool: object = None
    budget: int = DEFAULT_BUDGET
    warm: np.ndarray = None
    warm_prox: np.ndarray = None
    gradient_path: list = field(default=None)

    def __post_init__(self):
        if self.constants is None:
            self.constants = compute_constants(self.problem)
        if self.gradient_path is None:
            self.gradient_path = _gradient_components(self.problem)

    def primal(self, y, beta1, target):
        batch = solve_primal_batch(self.problem, y, beta1, target, pool=self.pool,
                                   budget=self.budget, warm=self.warm)
        self.warm = batch.x
        return batch


def _gradient_components(problem):
    """Components whose prox-linear step uses the projected-gradient model."""
    out = []
    for i, c in enumerate(problem.components):
        if problem.closed_forms[i] == "l1":
            continue
        if c.objective.smooth and c.objective.lipschitz is not None:
            out.append(i)
    return out


@dataclass
class StepResult:
    """Output of one scheme step.

    ``eps`` and ``certified`` describe the solves whose accuracy enters the
    gap budget: ``x~*(yhat)`` for the dual scheme, the prox-linear solves for
    the primal scheme.
    """

    iterate: Iterate
    alpha: float
    eps: np.ndarray
    certified: np.ndarray
    iterations: int
    yhat: np.ndarray = None
    x_hat: np.ndarray = None
    mu: np.ndarray = None

    def __iter__(self):
        return iter((self.iterate, self.alpha))


def _alpha(ctx, x):
    c = ctx.constants
    p = float(np.sum(ctx.problem.prox_parts(x)))
    return min(1.0, max(c.alpha_star, p / c.D_X))


def init_point(problem, beta1, eps0, *, ctx=None):
    """Starting pair ``x0 = x~*(0; beta1)``, ``y0 = (A x0 - b) / L^g(beta1)``.

    Returns ``(iterate, delta0, batch)`` where ``delta0`` is the gap budget
    certified by the achieved subproblem accuracies (0 for exact solves).
    """
    if not beta1 > 0:
        raise ValueError(f"beta1 must be positive, got {beta1}")
    if eps0 < 0:
        raise ValueError("eps0 must be nonnegative")
    ctx = Context(problem) if ctx is None else ctx
    c = ctx.constants
    if not c.L_A > 0:
        raise ValueError("coupling matrix is zero; the problem decouples and needs no dual method")
    batch = ctx.primal(np.zeros(problem.m), beta1, eps0)
    r = problem.residual(batch.x)
    y = r / dual_lipschitz(beta1, c)
    delta0 = initial_delta(beta1, batch.eps, problem.sigmas, c)
    return Iterate(x=batch.x.copy(), y=y, residual=r), delta0, batch


def check_dual_condition(state, L_A, rtol=1e-10):
    """Coupling ``beta1 beta2 >= tau^2/(1 - tau) L_A`` needed by the dual scheme."""
    t = state.tau
    need = t * t / (1.0 - t) * L_A
    return state.beta1 * state.beta2 >= need * (1.0 - rtol)


def check_primal_condition(state, L_A, rtol=1e-10):
    """Coupling ``beta1 beta2 >= (tau/(1 - tau))^2 L_A`` needed by the primal scheme."""
    t = state.tau
    need = (t / (1.0 - t)) ** 2 * L_A
    return state.beta1 * state.beta2 >= need * (1.0 - rtol)


def scheme_Sd(problem, it, state, *, ctx=None, check=True):
    """One primal step and two dual steps.

    ``yhat = (1-tau) y + tau (A x - b)/beta2``; the subproblems are solved at
    ``yhat`` to accuracy ``state.epsbar``; ``x+ = (1-tau) x + tau x~``;
    ``y+ = yhat + (A x~ - b)/L^g(beta1)``. Returns a :class:`StepResult`
    that unpacks as ``(iterate, alpha)``.
    """
    ctx = Context(problem) if ctx is None else ctx
    c = ctx.constants
    if check and not check_dual_condition(state, c.L_A):
        raise SchemeViolation(
            f"beta1*beta2={state.beta1 * state.beta2:.6e} below "
            f"tau^2/(1-tau)*L_A={state.tau ** 2 / (1 - state.tau) * c.L_A:.6e}")
    t = state.tau
    yhat = (1.0 - t) * it.y + (t / state.beta2) * it.residual
    batch = ctx.primal(yhat, state.beta1, state.epsbar)
    xt = batch.x
    x_new = (1.0 - t) * it.x + t * xt
    rt = problem.residual(xt)
    y_new = yhat + rt / dual_lipschitz(state.beta1, c)
    nxt = Iterate(x=x_new, y=y_new, residual=problem.residual(x_new))
    return StepResult(iterate=nxt, alpha=_alpha(ctx, xt), eps=batch.eps,
                      certified=batch.certified, iterations=int(np.sum(batch.iterations)),
                      yhat=yhat)


def prox_linear_step(problem, x_hat, beta2, target, *, ctx=None):
    """Block update ``P~(x_hat, beta2)`` on the quadratic upper model of the penalty.

    Each block minimizes ``phi_i + <grad_i psi(x_hat), x> + L_i/2 ||x - x_hat_i||^2``
    with ``L_i = M ||A_i||^2 / beta2``. Blocks with a smooth objective take a
    projected gradient step on ``phi_i`` as well, with modulus
    ``L^phi_i + L_i``, which is exact. Returns ``(x, eps, certified, mu, iters)``.
    """
    ctx = Context(problem) if ctx is None else ctx
    c = ctx.constants
    r = problem.residual(x_hat)
    g = problem.A_full_T @ (r / beta2)
    mu = c.M * c.norms_A ** 2 / beta2
    grad_comps = ctx.gradient_path
    batch = solve_batch(problem, g, mu, x_hat, target, pool=ctx.pool, budget=ctx.budget,
                        warm=ctx.warm_prox, skip=set(grad_comps))
    x = batch.x
    mu_eff = mu.copy()
    off = problem.offsets
    for i in grad_comps:
        s, e = off[i], off[i + 1]
        comp = problem.components[i]
        L = comp.objective.lipschitz + mu[i]
        z = x_hat[s:e]
        if L > 0:
            x[s:e] = comp.feasible_set.project(z - (comp.objective.grad(z) + g[s:e]) / L)
        else:
            x[s:e] = z
        mu_eff[i] = L
    ctx.warm_prox = x
    return x, batch.eps, batch.certified, mu_eff, int(np.sum(batch.iterations))


def scheme_Sp(problem, it, state, beta2_new, *, ctx=None, primal_batch=None, check=False):
    """Two primal steps and one dual step.

    ``x_hat = (1-tau) x + tau x~*(y; beta1)``,
    ``y+ = (1-tau) y + tau (A x_hat - b)/beta2_new`` and ``x+ = P~(x_hat, beta2_new)``.
    ``primal_batch`` may carry an already computed ``x~*(y; beta1)``; otherwise
    it is solved to ``state.epsbar``. The returned ``alpha`` is 0 (unused).
    """
    ctx = Context(problem) if ctx is None else ctx
    c = ctx.constants
    if not beta2_new > 0:
        raise ValueError("beta2_new must be positive")
    if check and not check_primal_condition(state, c.L_A):
        raise SchemeViolation("beta1*beta2 below (tau/(1-tau))^2 L_A")
    t = state.tau
    if primal_batch is None:
        primal_batch = ctx.primal(it.y, state.beta1, state.epsbar)
    x_hat = (1.0 - t) * it.x + t * primal_batch.x
    r_hat = problem.residual(x_hat)
    y_new = (1.0 - t) * it.y + (t / beta2_new) * r_hat
    x_new, eps, cert, mu, its = prox_linear_step(problem, x_hat, beta2_new, state.epsbar,
                                                 ctx=ctx)
    nxt = Iterate(x=x_new, y=y_new, residual=problem.residual(x_new))
    return StepResult(iterate=nxt, alpha=0.0, eps=eps, certified=cert, iterations=its,
                      x_hat=x_hat, mu=mu)


def make_context(problem, *, n_jobs=1, budget=DEFAULT_BUDGET):
    pool = ComponentPool(n_jobs) if n_jobs and n_jobs != 1 else None
    return Context(problem, pool=pool, budget=budget)


__all__ = ["Context", "StepResult", "SchemeViolation", "init_point", "scheme_Sd", "scheme_Sp",
           "prox_linear_step", "check_dual_condition", "check_primal_condition",
           "make_context"]
