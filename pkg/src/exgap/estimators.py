"""Estimator-style front end over the functional solvers."""

from sklearn.base import BaseEstimator

from .bench.cli import ALGORITHMS
from .egap.drivers import run
from .egap.state import SolveOptions
from .model.problem import Problem, validate


class DecompositionSolver(BaseEstimator):
    """Solve a separable coupled problem with any of the package's algorithms.

    Parameters mirror :class:`~exgap.egap.SolveOptions`; ``algorithm`` is one
    of ``idda1``, ``idda2``, ``fixed-beta1``, ``admm-v1``, ``admm-v2``,
    ``admm-v3`` or ``pcbdm``. ``eps_f`` is used by ``fixed-beta1`` only.

    Attributes set by :meth:`fit`: ``x_``, ``y_``, ``status_``, ``n_iter_``,
    ``objective_``, ``report_``.
    """

    def __init__(self, algorithm="idda1", *, beta0=1.0, eps_tilde=1e-3, tol_feas=1e-3,
                 tol_gap=1e-3, tol_stag=1e-3, window=5, maxiter=5000, n_jobs=1, strict=False,
                 eps_f=0.05):
        self.algorithm = algorithm
        self.beta0 = beta0
        self.eps_tilde = eps_tilde
        self.tol_feas = tol_feas
        self.tol_gap = tol_gap
        self.tol_stag = tol_stag
        self.window = window
        self.maxiter = maxiter
        self.n_jobs = n_jobs
        self.strict = strict
        self.eps_f = eps_f

    def _options(self):
        return SolveOptions(beta0=self.beta0, eps_tilde=self.eps_tilde, tol_feas=self.tol_feas,
                            tol_gap=self.tol_gap, tol_stag=self.tol_stag, window=self.window,
                            maxiter=self.maxiter, n_jobs=self.n_jobs, strict=self.strict)

    def fit(self, problem, y=None):
        """Run the configured algorithm on ``problem``; ``y`` is ignored."""
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if not isinstance(problem, Problem):
            raise TypeError(f"fit expects a Problem, got {type(problem).__name__}")
        validate(problem)
        rep = run(problem, self.algorithm, self._options(), eps_f=self.eps_f)
        self.report_ = rep
        self.x_ = rep.x
        self.y_ = rep.y
        self.status_ = rep.status
        self.n_iter_ = rep.iterations
        self.objective_ = rep.final.phi
        return self

    def score(self, problem=None, y=None):
        """Negative relative feasibility gap of the fitted point (higher is better)."""
        if not hasattr(self, "report_"):
            raise AttributeError("call fit first")
        return -self.report_.final.rpfgap


__all__ = ["DecompositionSolver"]
