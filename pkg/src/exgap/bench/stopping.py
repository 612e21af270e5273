"""Termination rules shared by every solver in the package."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class StopDecision:
    stop: bool
    reason: str = ""


def rpfgap(residual_norm, b_norm):
    """Relative primal feasibility gap ``||Ax - b|| / max(||b||, 1)``."""
    return residual_norm / max(b_norm, 1.0)


def stagnated(phis, tol, window=5):
    """Objective changed by at most ``tol`` (relative) over the last ``window`` steps."""
    if len(phis) < window + 1:
        return False
    cur = phis[-1]
    scale = max(1.0, abs(cur))
    return all(abs(cur - phis[-1 - j]) / scale <= tol for j in range(1, window + 1))


def stopping_check(rows, tol_feas=1e-3, tol_gap=1e-3, tol_stag=1e-3, window=5, use_gap=True):
    """Decide termination from the trace so far.

    Stops when the relative feasibility gap of the last row is at most
    ``tol_feas`` and either the surrogate gap ``|f - g~|`` is small relative
    to ``max(1, |g~|, |f|)`` (only when ``use_gap``) or the objective has
    stagnated over ``window`` iterations.
    """
    if not rows:
        raise ValueError("stopping_check needs at least one trace row")
    last = rows[-1]
    if not np.isfinite(last.rpfgap) or last.rpfgap > tol_feas:
        return StopDecision(False)
    if use_gap and np.isfinite(last.fval) and np.isfinite(last.gval):
        scale = max(1.0, abs(last.gval), abs(last.fval))
        if abs(last.fval - last.gval) <= tol_gap * scale:
            return StopDecision(True, "gap")
    tail = [r.phi for r in rows[-(window + 1):]]
    if stagnated(tail, tol_stag, window):
        return StopDecision(True, "stagnation")
    return StopDecision(False)
