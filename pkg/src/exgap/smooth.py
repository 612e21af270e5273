"""Smoothed dual function, quadratic-penalty surrogate and gap bounds."""

from dataclasses import dataclass

import numpy as np

from ._parallel import tree_sum
from .model.problem import compute_constants
from .subprob import BatchResult, phi_parts, solve_primal_batch


@dataclass
class SmoothedDualEval:
    """``g(y; beta1)`` evaluated at inexact minimizers.

    ``value`` is ``sum_i h_i(x~_i)``, an upper bound on the exact smoothed
    dual by at most ``sum_i beta1 sigma_i eps_i^2 / 2``; ``grad`` is the
    surrogate gradient ``A x~ - b``.
    """

    value: float
    grad: np.ndarray
    x: np.ndarray
    eps: np.ndarray
    certified: np.ndarray
    iterations: np.ndarray
    y: np.ndarray
    beta1: float
    phi: float
    prox: float


@dataclass
class PenaltyEval:
    """``psi(x; beta2) = ||Ax - b||^2 / (2 beta2)``, its maximizer ``y*`` and ``f = phi + psi``."""

    psi: float
    ystar: np.ndarray
    f: float
    residual: np.ndarray


@dataclass
class GapBounds:
    feas_bound: float
    dual_gap_upper: float
    dual_gap_lower: float


def dual_value(problem, x, y, beta1, residual=None):
    """``sum_i h_i(x_i; y, beta1)`` for a given primal point."""
    phi = tree_sum(phi_parts(problem, x))
    prox = tree_sum(problem.prox_parts(x))
    r = problem.residual(x) if residual is None else residual
    return phi + float(y @ r) + beta1 * prox, phi, prox, r


def evaluate_dual(problem, y, beta1, batch):
    """Wrap a batch solve at ``(y, beta1)`` into a :class:`SmoothedDualEval`."""
    value, phi, prox, r = dual_value(problem, batch.x, y, beta1)
    return SmoothedDualEval(value=value, grad=r, x=batch.x, eps=batch.eps,
                            certified=batch.certified, iterations=batch.iterations, y=y,
                            beta1=beta1, phi=phi, prox=prox)


def smoothed_dual(problem, y, beta1, per_component_eps=0.0, *, pool=None, warm=None, budget=None):
    """Solve all primal subproblems at ``(y, beta1)`` and aggregate.

    Sums run over components in index order with a pairwise reduction, so the
    result does not depend on how many workers ``pool`` uses.
    """
    if not beta1 > 0:
        raise ValueError(f"beta1 must be positive, got {beta1}")
    if per_component_eps < 0:
        raise ValueError("per_component_eps must be nonnegative")
    y = np.asarray(y, dtype=np.float64)
    kw = {} if budget is None else {"budget": budget}
    batch = solve_primal_batch(problem, y, beta1, per_component_eps, pool=pool, warm=warm, **kw)
    return evaluate_dual(problem, y, beta1, batch)


def dual_lipschitz(beta1, constants):
    """``L^g(beta1) = (1/beta1) sum_i ||A_i||^2 / sigma_i``."""
    if not beta1 > 0:
        raise ValueError(f"beta1 must be positive, got {beta1}")
    return constants.sum_A2_sigma / beta1


def penalty(problem, x, beta2, phi=None):
    """Quadratic penalty surrogate at ``x``; ``phi`` may be passed if already known."""
    if not beta2 > 0:
        raise ValueError(f"beta2 must be positive, got {beta2}")
    r = problem.residual(x)
    psi = float(r @ r) / (2.0 * beta2)
    if phi is None:
        phi = tree_sum(phi_parts(problem, x))
    return PenaltyEval(psi=psi, ystar=r / beta2, f=phi + psi, residual=r)


def gradient_map(yhat, beta1, ev, constants):
    """Dual gradient step ``yhat + grad~ / L^g(beta1)``."""
    return yhat + ev.grad / dual_lipschitz(beta1, constants)


def gap_bounds(problem, x, y, beta1, beta2, delta, R_ref, constants=None):
    """Feasibility and duality-gap bounds implied by the delta-excessive gap condition.

    ``y`` is accepted for symmetry with the iterate pair; the bounds depend
    on it only through the condition itself.
    """
    for name, v in (("beta1", beta1), ("beta2", beta2), ("delta", delta), ("R_ref", R_ref)):
        if v < 0:
            raise ValueError(f"{name} must be nonnegative")
    c = compute_constants(problem) if constants is None else constants
    if beta2 > 0:
        inner = R_ref ** 2 + 2.0 * beta1 * c.D_X / beta2 + 2.0 * delta / beta2
        feas = beta2 * (R_ref + np.sqrt(inner))
    else:
        # limit beta2 -> 0 of the expression above
        feas = 0.0
    F = float(np.linalg.norm(problem.residual(x)))
    return GapBounds(feas_bound=float(feas), dual_gap_upper=float(delta + beta1 * c.D_X),
                     dual_gap_lower=float(-R_ref * F))


__all__ = ["SmoothedDualEval", "PenaltyEval", "GapBounds", "BatchResult", "smoothed_dual",
           "evaluate_dual", "dual_value", "dual_lipschitz", "penalty", "gradient_map",
           "gap_bounds", "tree_sum"]
