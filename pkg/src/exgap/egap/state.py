"""Iterates, scheduler state, trace rows and solve options."""

import csv
import io
from dataclasses import dataclass, field, fields, replace

import numpy as np

TRACE_COLUMNS = ("k", "tau", "beta1", "beta2", "delta", "epsbar", "feas", "rpfgap", "phi",
                 "sgap", "ms")

CONVERGED = "converged"
MAXITER = "maxiter"
SUBPROBLEM_FAILURE = "subproblem_failure"
NUMERICAL_FAILURE = "numerical_failure"
STATUSES = (CONVERGED, MAXITER, SUBPROBLEM_FAILURE, NUMERICAL_FAILURE)

# lower bounds keeping y*(x; beta2) and the tau recursions finite
TAU_FLOOR = 1e-12
BETA2_FLOOR = 1e-14


@dataclass(frozen=True)
class SchedulerState:
    """Parameters of iteration ``k``: step ``tau``, smoothness pair, error budget."""

    k: int
    tau: float
    beta1: float
    beta2: float
    delta: float = 0.0
    epsbar: float = 0.0
    alpha: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.tau < 1.0:
            raise ValueError(f"tau must lie in [0, 1), got {self.tau}")
        if not (self.beta1 > 0 and self.beta2 > 0):
            raise ValueError(f"beta1 and beta2 must be positive, got {self.beta1}, {self.beta2}")
        if self.delta < 0 or self.epsbar < 0:
            raise ValueError("delta and epsbar must be nonnegative")

    def evolve(self, **changes):
        return replace(self, **changes)


@dataclass
class Iterate:
    """Primal-dual pair ``(x, y)`` with the cached residual ``A x - b``."""

    x: np.ndarray
    y: np.ndarray
    residual: np.ndarray

    @property
    def feas(self):
        return float(np.linalg.norm(self.residual))

    @classmethod
    def from_point(cls, problem, x, y):
        x = np.asarray(x, dtype=np.float64)
        return cls(x=x, y=np.asarray(y, dtype=np.float64), residual=problem.residual(x))


@dataclass
class TraceRow:
    k: int
    tau: float
    beta1: float
    beta2: float
    delta: float
    epsbar: float
    feas: float
    rpfgap: float
    phi: float
    sgap: float
    ms: float
    fval: float = np.nan
    gval: float = np.nan
    scheme: str = ""
    flags: tuple = ()
    extra: dict = field(default_factory=dict)

    def as_tuple(self):
        return tuple(getattr(self, c) for c in TRACE_COLUMNS)


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % v


def write_trace_csv(rows, target):
    """Write trace rows with the fixed column header; ``target`` is a path or text stream."""
    if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
        with open(target, "w", newline="") as fh:
            return write_trace_csv(rows, fh)
    w = csv.writer(target, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for r in rows:
        w.writerow([_fmt(v) for v in r.as_tuple()])
    return None


@dataclass
class SolveReport:
    """Outcome of a solve: status, full trace and final iterate."""

    status: str
    trace: list
    x: np.ndarray
    y: np.ndarray
    iterations: int
    algorithm: str
    message: str = ""
    constants: object = None
    extra: dict = field(default_factory=dict)

    @property
    def converged(self):
        return self.status == CONVERGED

    def column(self, name):
        return np.array([getattr(r, name) for r in self.trace])

    def to_csv(self, target=None):
        """Write the trace; returns the CSV text when ``target`` is None."""
        if target is None:
            buf = io.StringIO()
            write_trace_csv(self.trace, buf)
            return buf.getvalue()
        write_trace_csv(self.trace, target)
        return None

    @property
    def final(self):
        return self.trace[-1]


@dataclass
class SolveOptions:
    """Options shared by the drivers and the baselines.

    ``eps_tilde = 0`` selects exact mode, which needs closed-form subproblem
    solvers for every component. ``R_ref`` is an optional reference dual
    radius, used only to report the fixed-smoothing bounds.
    """

    beta0: float = 1.0
    eps_tilde: float = 1e-3
    tol_feas: float = 1e-3
    tol_gap: float = 1e-3
    tol_stag: float = 1e-3
    window: int = 5
    maxiter: int = 5000
    n_jobs: int = 1
    strict: bool = False
    check_stopping: bool = True
    use_gap: bool = True
    inner_budget: int = 5000
    eps_floor: float = 1e-10
    callback: object = None
    trace_path: object = None
    R_ref: float = None

    def __post_init__(self):
        if not self.beta0 > 0:
            raise ValueError(f"beta0 must be positive, got {self.beta0}")
        if not self.eps_tilde >= 0:
            raise ValueError(f"eps_tilde must be nonnegative, got {self.eps_tilde}")
        for name in ("tol_feas", "tol_gap", "tol_stag"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if int(self.window) != self.window or self.window < 1:
            raise ValueError("window must be a positive integer")
        if int(self.maxiter) != self.maxiter or self.maxiter < 0:
            raise ValueError("maxiter must be a nonnegative integer")
        if int(self.inner_budget) != self.inner_budget or self.inner_budget < 1:
            raise ValueError("inner_budget must be a positive integer")
        if self.eps_floor < 0:
            raise ValueError("eps_floor must be nonnegative")
        if self.R_ref is not None and self.R_ref < 0:
            raise ValueError("R_ref must be nonnegative")
        self.window = int(self.window)
        self.maxiter = int(self.maxiter)

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown solver options: {sorted(unknown)}")
        return cls(**d)


__all__ = ["SchedulerState", "Iterate", "TraceRow", "SolveReport", "SolveOptions",
           "TRACE_COLUMNS", "write_trace_csv", "CONVERGED", "MAXITER", "SUBPROBLEM_FAILURE",
           "NUMERICAL_FAILURE", "STATUSES", "TAU_FLOOR", "BETA2_FLOOR"]
