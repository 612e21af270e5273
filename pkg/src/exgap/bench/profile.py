"""Performance profiles over a set of (problem, solver) runs."""

import csv
import math
from dataclasses import asdict, dataclass

import numpy as np

METRICS = {"iterations": "iterations", "iters": "iterations", "time": "time"}


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one solver on one problem; only ``converged`` runs count as solved."""

    solver: str
    problem: str
    status: str
    iterations: int
    time: float
    rpfgap: float = float("nan")
    objective: float = float("nan")

    @property
    def solved(self):
        return self.status == "converged"

    def to_dict(self):
        return asdict(self)


@dataclass
class ProfileCurve:
    """Step function ``rho_s(tau)`` sampled at ``taus`` (log2 ratios)."""

    solver: str
    taus: np.ndarray
    rho: np.ndarray

    def at(self, tau):
        """Value of the step function at an arbitrary ``tau``."""
        idx = np.searchsorted(self.taus, tau, side="right") - 1
        return 0.0 if idx < 0 else float(self.rho[idx])


def performance_ratios(records, metric="iterations"):
    """``(problems, solvers, log2 ratio matrix)``; failed runs get ``inf``.

    Problems where no solver succeeded keep ``inf`` for every solver.
    """
    if not records:
        raise ValueError("performance profile needs at least one run record")
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {sorted(METRICS)}")
    field = METRICS[metric]
    problems = sorted({r.problem for r in records})
    solvers = sorted({r.solver for r in records})
    pi = {p: j for j, p in enumerate(problems)}
    si = {s: j for j, s in enumerate(solvers)}
    T = np.full((len(problems), len(solvers)), np.inf)
    seen = set()
    for r in records:
        key = (r.problem, r.solver)
        if key in seen:
            raise ValueError(f"duplicate record for problem {r.problem!r}, solver {r.solver!r}")
        seen.add(key)
        v = float(getattr(r, field))
        if r.solved and math.isfinite(v):
            if v < 0:
                raise ValueError(f"negative {field} in record {key}")
            T[pi[r.problem], si[r.solver]] = v
    best = T.min(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(T == best, 1.0, T / best)
    ratio[~np.isfinite(T)] = np.inf
    return problems, solvers, np.log2(ratio)


def performance_profile(records, metric="iterations"):
    """Profile curves, one per solver, sampled at 0 and at every finite log2 ratio."""
    problems, solvers, L = performance_ratios(records, metric)
    finite = L[np.isfinite(L)]
    taus = np.unique(np.concatenate(([0.0], finite)))
    n_p = len(problems)
    curves = []
    for j, s in enumerate(solvers):
        col = np.sort(L[:, j])
        counts = np.searchsorted(col, taus, side="right")
        curves.append(ProfileCurve(solver=s, taus=taus, rho=counts / n_p))
    return curves


def write_profile_csv(curves, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["solver", "tau", "rho"])
        for c in curves:
            for t, r in zip(c.taus, c.rho):
                w.writerow([c.solver, "%.17g" % t, "%.17g" % r])


def plot_profile(curves, path, metric="iterations"):
    """Step plot of the curves saved as a standalone vector file."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    right = max(float(c.taus[-1]) for c in curves)
    right = right + max(0.5, 0.05 * right)
    for c in curves:
        ax.step(np.append(c.taus, right), np.append(c.rho, c.rho[-1]), where="post",
                label=c.solver)
    ax.set_xlabel(r"$\tau$ ($\log_2$ ratio to best)")
    ax.set_ylabel(r"$\rho_s(\tau)$")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(f"performance profile ({metric})")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


__all__ = ["RunRecord", "ProfileCurve", "performance_ratios", "performance_profile",
           "write_profile_csv", "plot_profile", "METRICS"]
