"""Per-component strongly convex subproblems with certified accuracy.

Every subproblem handled here has the form::

    minimize_{x in X_i}  F(x) = phi_i(x) + l'x + mu/2 ||x - z||^2,

which covers both the primal subproblem of the smoothed dual
(``l = A_i'y``, ``mu = beta1 * sigma_i``, ``z = center``) and the
prox-linear step of the two-primal scheme. A point ``x`` is certified to
accuracy ``eps`` when ``F(x) - F* <= mu/2 * eps^2``. For iterative solves the
certificate is ``eps = ||r|| / mu`` where ``r`` is an element of
``grad s(x) + N_X(x)`` (``s`` the smooth part), which bounds the gap by
strong convexity.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.optimize as sopt

from .model.objectives import QuadraticObjective
from .model.sets import Box, NonNegative

CLOSED_FORM = "closed_form"
SUBOPTIMALITY_BOUND = "suboptimality_bound"

DEFAULT_BUDGET = 5000
# iterations without improving the certificate before the solver gives up
DEFAULT_STALL = 300


class SubproblemError(RuntimeError):
    """Iteration budget exhausted before the requested accuracy was certified.

    The best point found is available as ``solution``.
    """

    def __init__(self, message, solution=None, component=None):
        if component is not None:
            message = f"component {component}: {message}"
        super().__init__(message)
        self.solution = solution
        self.component = component


class ConfigurationError(ValueError):
    """Solver options incompatible with the problem (e.g. exact mode without closed forms)."""


@dataclass(frozen=True)
class Subproblem:
    """Primal subproblem of component ``i`` at dual point ``y`` and smoothness ``beta1``."""

    i: int
    y: np.ndarray
    beta1: float

    def __post_init__(self):
        if not self.beta1 > 0:
            raise ValueError(f"beta1 must be positive, got {self.beta1}")


@dataclass
class SubproblemSolution:
    x: np.ndarray
    eps: float
    kind: str
    value: float = np.nan
    certified: bool = True
    iterations: int = 0


@dataclass
class BatchResult:
    """All-component solve: stacked point plus per-component accuracy data."""

    x: np.ndarray
    eps: np.ndarray
    certified: np.ndarray
    iterations: np.ndarray
    exact: np.ndarray = field(default=None)

    @property
    def all_certified(self):
        return bool(np.all(self.certified))


def soft_threshold_V(x_a, x_c, y, beta1, gamma):
    """Minimizer of ``gamma |x - x_a| + y x + beta1/2 (x - x_c)^2`` over the real line.

    Three cases: the kink ``x_a`` when ``y + beta1 (x_a - x_c)`` lies in
    ``[-gamma, gamma]`` (tested first, so ties resolve to the kink), else the
    smooth stationary point on the side where it is valid. Works elementwise
    on arrays.
    """
    x_a, x_c, y, beta1, gamma = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64)
                                                      for v in (x_a, x_c, y, beta1, gamma)))
    s = y + beta1 * (x_a - x_c)
    right = x_c - (gamma + y) / beta1
    left = x_c + (gamma - y) / beta1
    out = np.where(np.abs(s) <= gamma, x_a, np.where(right > x_a, right, left))
    return float(out) if out.ndim == 0 else out


def l1_component_solve(aTy, x_c, beta1):
    """``argmin |x| + aTy * x + beta1/2 (x - x_c)^2``."""
    return soft_threshold_V(0.0, x_c, aTy, beta1, 1.0)


def _l1_plan(problem):
    plan = problem._cache.get("l1plan")
    if plan is not None:
        return plan
    idx, comp, w, a, lo, hi, others = [], [], [], [], [], [], []
    for i, c in enumerate(problem.components):
        if problem.closed_forms[i] != "l1":
            others.append(i)
            continue
        n_i = int(problem.sizes[i])
        s, e = problem.offsets[i], problem.offsets[i + 1]
        wi, ai = c.objective.l1_params(n_i)
        li, ui = c.feasible_set.bounds(n_i)
        idx.append(np.arange(s, e))
        comp.append(np.full(n_i, i))
        w.append(wi)
        a.append(ai)
        lo.append(li)
        hi.append(ui)
    cat = (lambda parts, dt=np.float64: np.concatenate(parts).astype(dt) if parts
           else np.zeros(0, dtype=dt))
    plan = dict(idx=cat(idx, np.int64), comp=cat(comp, np.int64), w=cat(w), a=cat(a),
                lo=cat(lo), hi=cat(hi), others=others,
                l1_comps=np.array(sorted(set(range(problem.M)) - set(others)), dtype=np.int64))
    # per-component coordinate starts within the l1 group, for segmented sums
    if plan["idx"].size:
        starts = np.flatnonzero(np.r_[True, np.diff(plan["comp"]) != 0])
        plan["starts"] = starts
    problem._cache["l1plan"] = plan
    return plan


def has_closed_forms(problem):
    """True when every component is solved analytically."""
    return all(k is not None for k in problem.closed_forms)


def phi_parts(problem, x):
    """Per-component objective values, vectorized over the coordinatewise blocks."""
    plan = _l1_plan(problem)
    out = np.zeros(problem.M)
    if plan["idx"].size:
        v = plan["w"] * np.abs(x[plan["idx"]] - plan["a"])
        out[plan["l1_comps"]] = np.add.reduceat(v, plan["starts"])
    for i in plan["others"]:
        out[i] = problem.components[i].objective.value(problem.block(x, i))
    return out


def _eigh(problem, i):
    cache = problem._cache.setdefault("eigh", {})
    if i not in cache:
        cache[i] = np.linalg.eigh(problem.components[i].objective.dense_Q)
    return cache[i]


def _is_orthant(X, n):
    if isinstance(X, NonNegative):
        return True
    if isinstance(X, Box):
        lo, hi = X.bounds(n)
        return bool(np.all(lo == 0.0) and np.all(np.isinf(hi)))
    return False


def _closed_form(problem, i, l, mu, z):
    kind = problem.closed_forms[i]
    comp = problem.components[i]
    X = comp.feasible_set
    if kind == "l1":
        n_i = z.size
        w, a = comp.objective.l1_params(n_i)
        lo, hi = X.bounds(n_i)
        return np.clip(soft_threshold_V(a, z, l, mu, w), lo, hi)
    if kind == "projection":
        return X.project(z - l / mu)
    if kind == "linear":
        lam, V = _eigh(problem, i)
        rhs = mu * z - l - comp.objective.q
        return V @ ((V.T @ rhs) / (lam + mu))
    if kind == "user":
        return np.asarray(comp.closed_form(l, mu, z), dtype=np.float64)
    raise ConfigurationError(f"component {i} has no closed-form solver")


def _certificate(obj, X, x, l, mu, z):
    """``||r|| / mu`` with ``r`` the min-norm element of ``grad s(x) + N_X(x)``, or None."""
    g = obj.grad(x) + l + mu * (x - z)
    r = X.min_norm_residual(x, g)
    return None if r is None else float(np.linalg.norm(r)) / mu


def accelerated_prox_gradient(obj, X, l, mu, z, target_eps, budget, x0=None,
                              stall=DEFAULT_STALL):
    """Constant-momentum accelerated projected gradient on ``F`` with adaptive restart.

    Returns ``(x, eps, certified, iterations)`` where ``x`` is the point with
    the smallest certificate seen.
    """
    L = float(obj.lipschitz) + mu
    x = X.project(z if x0 is None else x0)

    def grad(v):
        return obj.grad(v) + l + mu * (v - z)

    eps0 = _certificate(obj, X, x, l, mu, z)
    best_x, best_eps = x, (np.inf if eps0 is None else eps0)
    if best_eps <= target_eps:
        return best_x, best_eps, True, 0
    sq = np.sqrt(mu / L)
    theta = (1.0 - sq) / (1.0 + sq)
    # momentum oscillates with period ~ 1/sq; do not call that a stall
    stall = max(stall, int(10.0 / sq))
    w = x
    gw = grad(w)
    last_gain = 0
    it = 0
    for it in range(1, budget + 1):
        xn = X.project(w - gw / L)
        gx = grad(xn)
        r = X.min_norm_residual(xn, gx)
        if r is None:
            # prox-step residual: an element of grad s(xn) + N_X(xn)
            r = gx - gw + L * (w - xn)
        eps = float(np.linalg.norm(r)) / mu
        if eps < best_eps:
            best_x, best_eps = xn, eps
            last_gain = it
        if best_eps <= target_eps:
            return best_x, best_eps, True, it
        if it - last_gain > stall:
            break
        # gradient-based adaptive restart: drop momentum when it points uphill
        if float(gw @ (xn - x)) > 0.0:
            w = xn
        else:
            w = xn + theta * (xn - x)
        if obj.domain_restricted:
            w = X.project(w)
        x = xn
        gw = grad(w)
    return best_x, best_eps, False, it


def _nnls_quadratic(obj, l, mu, z):
    """Exact minimizer of ``1/2 x'Qx + (q + l)'x + mu/2 ||x - z||^2`` over ``x >= 0``."""
    H = obj.dense_Q + mu * np.eye(z.size)
    f = obj.q + l - mu * z
    C = sla.cholesky(H, lower=True, check_finite=False)
    rhs = -sla.solve_triangular(C, f, lower=True, check_finite=False)
    x, _ = sopt.nnls(C.T, rhs, maxiter=50 * z.size)
    return x


def solve_prox(problem, i, l, mu, z, target_eps, *, budget=DEFAULT_BUDGET, warm=None):
    """Solve the generic subproblem of component ``i``.

    Returns ``(x, eps, kind, certified, iterations)``.
    """
    if problem.closed_forms[i] is not None:
        return _closed_form(problem, i, l, mu, z), 0.0, CLOSED_FORM, True, 0
    if target_eps <= 0:
        raise ConfigurationError(
            f"component {i}: target accuracy 0 requires a closed-form solver")
    comp = problem.components[i]
    obj, X = comp.objective, comp.feasible_set
    if obj.lipschitz is None:
        raise ConfigurationError(
            f"component {i}: objective {type(obj).__name__} has neither a closed form nor a gradient")
    x0 = warm
    if isinstance(obj, QuadraticObjective) and _is_orthant(X, z.size):
        try:
            xq = _nnls_quadratic(obj, l, mu, z)
        except (np.linalg.LinAlgError, RuntimeError):
            xq = None
        if xq is not None:
            eps = _certificate(obj, X, xq, l, mu, z)
            if eps is not None and eps <= target_eps:
                return xq, eps, SUBOPTIMALITY_BOUND, True, 1
            x0 = xq
    x, eps, ok, its = accelerated_prox_gradient(obj, X, l, mu, z, target_eps, budget, x0)
    return x, eps, SUBOPTIMALITY_BOUND, ok, its


def _h_value(problem, i, x, y, beta1):
    comp = problem.components[i]
    p = problem.prox[i]
    d = x - p.center
    return (comp.objective.value(x) + float(y @ (problem.mats[i] @ x - problem.bs[i]))
            + beta1 * (0.5 * p.sigma * float(d @ d) + p.shift))


def _sub_data(problem, sub):
    p = problem.prox[sub.i]
    y = np.asarray(sub.y, dtype=np.float64)
    l = problem.mats[sub.i].T @ y
    return l, sub.beta1 * p.sigma, p.center


def solve_component(problem, sub, target_eps, *, budget=DEFAULT_BUDGET, warm=None):
    """Solve one primal subproblem to certified accuracy ``target_eps``.

    Dispatches to a closed form when one is registered, otherwise to an
    iterative solver. Raises :class:`SubproblemError` when the budget runs out
    before the accuracy is certified and :class:`ConfigurationError` for
    ``target_eps = 0`` without a closed form.
    """
    if target_eps < 0:
        raise ValueError("target_eps must be nonnegative")
    l, mu, z = _sub_data(problem, sub)
    x, eps, kind, ok, its = solve_prox(problem, sub.i, l, mu, z, target_eps,
                                       budget=budget, warm=warm)
    sol = SubproblemSolution(x=x, eps=eps, kind=kind, value=_h_value(problem, sub.i, x, sub.y, sub.beta1),
                             certified=ok, iterations=its)
    if not ok:
        raise SubproblemError(f"budget of {budget} iterations exhausted at eps={eps:.3e} "
                              f"(target {target_eps:.3e})", sol, sub.i)
    return sol


def projected_gradient_solve(problem, sub, target_eps, budget=DEFAULT_BUDGET, *, warm=None):
    """Accelerated projected gradient on the subproblem regardless of closed forms.

    Raises :class:`SubproblemError` (carrying the best point) if the budget is
    exhausted before the certificate reaches ``target_eps``.
    """
    if not target_eps > 0:
        raise ValueError("target_eps must be positive")
    comp = problem.components[sub.i]
    obj = comp.objective
    if obj.lipschitz is None:
        raise ConfigurationError(f"component {sub.i}: objective has no gradient")
    l, mu, z = _sub_data(problem, sub)
    x, eps, ok, its = accelerated_prox_gradient(obj, comp.feasible_set, l, mu, z, target_eps,
                                                budget, warm)
    sol = SubproblemSolution(x=x, eps=eps, kind=SUBOPTIMALITY_BOUND,
                             value=_h_value(problem, sub.i, x, sub.y, sub.beta1),
                             certified=ok, iterations=its)
    if not ok:
        raise SubproblemError(f"budget of {budget} iterations exhausted at eps={eps:.3e}",
                              sol, sub.i)
    return sol


def certify_accuracy(problem, sub, candidate, lower_bound, tol=1e-9):
    """Accuracy implied by a lower bound on the subproblem optimum.

    ``eps = sqrt(2 max(0, h(candidate) - lower_bound) / (beta1 sigma_i))``.
    """
    candidate = np.asarray(candidate, dtype=np.float64)
    X = problem.components[sub.i].feasible_set
    if not X.contains(candidate, tol):
        raise ValueError(f"component {sub.i}: candidate is not feasible")
    gap = _h_value(problem, sub.i, candidate, np.asarray(sub.y, dtype=np.float64), sub.beta1) - lower_bound
    mu = sub.beta1 * problem.prox[sub.i].sigma
    return float(np.sqrt(2.0 * max(0.0, gap) / mu))


def solve_batch(problem, l, mu, z, target_eps, *, pool=None, budget=DEFAULT_BUDGET, warm=None,
                skip=()):
    """Solve the generic subproblem for every component.

    ``l`` and ``z`` are full-length vectors, ``mu`` holds one modulus per
    component. Coordinatewise closed forms are evaluated in one vectorized
    pass; the remaining components go through ``pool`` (serial if None).
    Uncertified components are returned with ``certified=False``; deciding
    what to do with them is left to the caller. Components listed in
    ``skip`` (iterative ones only) are left unsolved for the caller to fill.
    """
    M = problem.M
    plan = _l1_plan(problem)
    x = np.empty(problem.n)
    eps = np.zeros(M)
    certified = np.ones(M, dtype=bool)
    iters = np.zeros(M, dtype=np.int64)
    idx = plan["idx"]
    if idx.size:
        mu_c = mu[plan["comp"]]
        v = soft_threshold_V(plan["a"], z[idx], l[idx], mu_c, plan["w"])
        x[idx] = np.clip(v, plan["lo"], plan["hi"])
    others = [i for i in plan["others"] if i not in skip] if skip else plan["others"]
    if others:
        off = problem.offsets

        def one(i):
            s, e = off[i], off[i + 1]
            w = None if warm is None else warm[s:e]
            return solve_prox(problem, i, l[s:e], float(mu[i]), z[s:e], target_eps,
                              budget=budget, warm=w)

        results = pool.map(one, others) if pool is not None else [one(i) for i in others]
        for i, (xi, ei, _, ok, its) in zip(others, results):
            x[off[i]:off[i + 1]] = xi
            eps[i] = ei
            certified[i] = ok
            iters[i] = its
    return BatchResult(x=x, eps=eps, certified=certified, iterations=iters)


def solve_primal_batch(problem, y, beta1, target_eps, **kw):
    """``x~*(y; beta1)`` for all components (the smoothed-dual minimizers)."""
    l = problem.A_full_T @ y
    mu = beta1 * problem.sigmas
    return solve_batch(problem, l, mu, problem.center, target_eps, **kw)


__all__ = ["Subproblem", "SubproblemSolution", "SubproblemError", "ConfigurationError",
           "BatchResult", "soft_threshold_V", "l1_component_solve", "solve_component",
           "projected_gradient_solve", "certify_accuracy", "solve_batch", "solve_primal_batch",
           "solve_prox", "phi_parts", "has_closed_forms", "accelerated_prox_gradient"
           ]
