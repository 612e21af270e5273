"""Step-size recursions and the inexactness budget.

The functions here are pure scalar arithmetic on a :class:`SchedulerState`
and the problem constants, so they can be tested in isolation from the
subproblem solvers.
"""

import math

import numpy as np

GOLDEN_TAU0 = 0.5 * (math.sqrt(5.0) - 1.0)
PRIMAL_TAU0 = 0.5


def update_tau_dual(tau, alpha):
    """Next step size after a two-dual-step update.

    Returns the positive root of ``t^2 + c t - c = 0`` with
    ``c = (1 - alpha tau) tau^2``, written in a cancellation-free form.
    """
    if not 0.0 <= tau < 1.0:
        raise ValueError(f"tau must lie in [0, 1), got {tau}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if tau == 0.0:
        return 0.0
    c = (1.0 - alpha * tau) * tau * tau
    # (sqrt(c^2 + 4c) - c) / 2 == 2c / (sqrt(c^2 + 4c) + c)
    return 2.0 * c / (math.sqrt(c * c + 4.0 * c) + c)


def update_tau_primal(tau):
    """``tau / (1 + tau)``; from ``tau0 = 1/2`` the k-th value is ``1/(k + 2)``."""
    if not 0.0 <= tau < 1.0:
        raise ValueError(f"tau must lie in [0, 1), got {tau}")
    return tau / (1.0 + tau)


def update_tau_fixed(tau):
    """Recursion used with fixed ``beta1``: the dual rule with ``alpha = 0``."""
    return update_tau_dual(tau, 0.0)


def tau_bounds(k, tau0, alpha_star):
    """Lower and upper envelopes on ``tau_k`` for the two-dual-step recursion."""
    return 1.0 / (k + 1.0 / tau0), 1.0 / (0.5 * (1.0 + alpha_star) * k + 1.0 / tau0)


def compute_Qk(state, y_norm, constants):
    """Error amplification factor of a two-dual-step update.

    ``eps`` accuracies of size at most ``epsbar <= 1`` raise the gap budget
    by at most ``Q_k * epsbar``.
    """
    c = constants
    t, b1, b2 = state.tau, state.beta1, state.beta2
    return (0.5 * t * b1 * c.sum_sigma
            + math.sqrt(c.M) * (b1 * c.C_d / c.L_A
                                + (1.0 - t) * t * (c.C_d / b2 + c.norm_A * y_norm)))


def compute_Rk(state, constants):
    """Error amplification factor of a two-primal-step update."""
    c = constants
    t = state.tau
    return (2.0 * (1.0 - t) * state.beta1 * c.D_sigma * math.sqrt(c.sum_sigma)
            + c.M * c.sum_A2 / (2.0 * (1.0 - t) * state.beta2))


def compute_C0(beta1_0, constants):
    """Scale of the initial accuracy ``epsbar_0 = eps_tilde / C0``."""
    c = constants
    return beta1_0 * (math.sqrt(c.M) * c.C_d / c.L_A + 0.5 * c.sum_sigma)


def accuracy_norms(eps, sigmas):
    """``(||eps||, sqrt(sum_i sigma_i eps_i^2))`` for per-component accuracies."""
    eps = np.asarray(eps, dtype=np.float64)
    return float(np.linalg.norm(eps)), float(np.sqrt(np.sum(sigmas * eps * eps)))


def eta(state, y_norm, eps, sigmas, constants):
    """Gap increase caused by inexact solves at ``yhat`` in a two-dual-step update."""
    c = constants
    t, b1, b2 = state.tau, state.beta1, state.beta2
    e1, es = accuracy_norms(eps, sigmas)
    return (0.5 * t * b1 * es * es
            + (b1 * c.C_d / c.L_A + (1.0 - t) * t * (c.C_d / b2 + c.norm_A * y_norm)) * e1)


def xi(state, eps_dual, eps_prox, mu_prox, sigmas, constants):
    """Gap increase of a two-primal-step update.

    ``eps_dual`` are the accuracies of ``x~*(y; beta1)``, ``eps_prox`` those of
    the prox-linear solves with moduli ``mu_prox``.
    """
    _, es = accuracy_norms(eps_dual, sigmas)
    ep = np.asarray(eps_prox, dtype=np.float64)
    return (2.0 * state.beta1 * (1.0 - state.tau) * constants.D_sigma * es
            + 0.5 * float(np.sum(np.asarray(mu_prox) * ep * ep)))


def initial_delta(beta1, eps, sigmas, constants):
    """Gap budget certified by an inexact starting point."""
    e1, es = accuracy_norms(eps, sigmas)
    return beta1 * (constants.C_d / constants.L_A * e1 + 0.5 * es * es)


def next_delta(delta, tau, increase):
    """Gap budget after a step whose inexact solves cost at most ``increase``.

    Within budget (``increase <= tau delta``) delta is kept exactly, which is
    the ``(1 - tau) delta + tau delta`` update without its rounding error.
    """
    if increase <= tau * delta:
        return delta
    return (1.0 - tau) * delta + increase


def requested_accuracy(state, factor, floor=1e-10, exact=False):
    """``epsbar = tau delta / factor`` bounded below by ``floor`` (0 in exact mode)."""
    if exact:
        return 0.0
    if factor <= 0 or not np.isfinite(factor):
        return floor
    return max(state.tau * state.delta / factor, floor)


__all__ = ["GOLDEN_TAU0", "PRIMAL_TAU0", "update_tau_dual", "update_tau_primal",
           "update_tau_fixed", "tau_bounds", "compute_Qk", "compute_Rk", "compute_C0",
           "accuracy_norms", "eta", "xi", "initial_delta", "next_delta", "requested_accuracy"]
