"""Separable problem data: components, validation and derived constants.

The model solved throughout the package is::

    minimize    sum_i phi_i(x_i)
    subject to  sum_i (A_i x_i - b_i) = 0,   x_i in X_i,

with a quadratic prox-function ``p_i(x) = sigma_i/2 ||x - c_i||^2 + r_i`` per
block. Unbounded sets are handled through a declared bounding radius ``R_i``,
which enters only the constant ``D_i = sigma_i/2 R_i^2 + r_i``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .._validation import ValidationError, check_matrix, check_scalar, check_vector
from .linalg import spectral_norm
from .objectives import AbsObjective, LogUtilityObjective, Objective, QuadraticObjective
from .sets import Ball, Box, CustomSet, FeasibleSet, NonNegative, WholeSpace

# full coupling matrices at least this large are kept sparse when any block is
_SPARSE_MIN_SHAPE = 64
DEFAULT_SHIFT_RATIO = 0.75


class ComponentSpec:
    """One block ``i`` of the separable problem.

    Parameters
    ----------
    objective : Objective
        Oracle for ``phi_i``.
    feasible_set : FeasibleSet
        Descriptor of ``X_i``.
    A : array_like or sparse matrix, shape (m, n_i)
    b : array_like, shape (m,), optional
        Offset ``b_i``; zeros by default.
    sigma : float
        Convexity parameter of the prox-function.
    shift : float or "auto"
        Prox shift ``r_i``. ``"auto"`` picks ``r_i`` so that
        ``r_i = ratio * D_i`` where ``ratio`` is the problem's ``shift_ratio``.
    radius : float, "auto" or None
        Bounding radius around the prox center for unbounded sets. ``"auto"``
        uses ``10 * (1 + ||center||)``; ``None`` declares no radius, which is
        rejected for unbounded sets.
    center : array_like, optional
        Prox center; defaults to the projection of the origin onto ``X_i``.
    closed_form : callable, optional
        ``closed_form(l, mu, z)`` returning the exact minimizer of
        ``phi_i(x) + l'x + mu/2 ||x - z||^2`` over ``X_i``.
    """

    def __init__(self, objective, feasible_set, A, b=None, *, sigma=1.0, shift="auto",
                 radius="auto", center=None, closed_form=None):
        self.objective = objective
        self.feasible_set = feasible_set
        self.A = A
        self.b = b
        self.sigma = sigma
        self.shift = shift
        self.radius = radius
        self.center = center
        self.closed_form = closed_form

    def __repr__(self):
        shape = getattr(self.A, "shape", None)
        return (f"ComponentSpec({self.objective!r}, {self.feasible_set!r}, A shape={shape}, "
                f"sigma={self.sigma})")


@dataclass(frozen=True)
class ProxData:
    """Resolved prox-function data of one block."""

    center: np.ndarray
    sigma: float
    shift: float
    D: float
    sup: float
    radius: float


class Problem:
    """Ordered collection of components sharing ``m`` coupling rows.

    Construct, then call :func:`validate` (solvers do this on entry). After
    validation the problem is treated as immutable.
    """

    def __init__(self, components, m=None, *, shift_ratio=DEFAULT_SHIFT_RATIO, name=None):
        self.components = tuple(components)
        self.m = m
        self.shift_ratio = shift_ratio
        self.name = name
        self.validated = False
        self._cache = {}

    def __repr__(self):
        return f"Problem(M={len(self.components)}, m={self.m}, n={getattr(self, 'n', '?')})"

    @property
    def M(self):
        return len(self.components)

    def _require_validated(self):
        if not self.validated:
            raise RuntimeError("problem has not been validated; call validate(problem) first")

    def split(self, x):
        """Views of the blocks of a full-length vector."""
        self._require_validated()
        return [x[s:e] for s, e in zip(self.offsets[:-1], self.offsets[1:])]

    def block(self, x, i):
        return x[self.offsets[i]:self.offsets[i + 1]]

    def residual(self, x):
        """``A x - b``."""
        return self.A_full @ x - self.b

    def phi_parts(self, x):
        """Per-component objective values ``phi_i(x_i)``."""
        return np.array([c.objective.value(self.block(x, i))
                         for i, c in enumerate(self.components)])

    def prox_parts(self, x):
        """Per-component prox values ``p_i(x_i)``."""
        d = x - self.center
        sq = np.add.reduceat(d * d, self.offsets[:-1]) if self.n else np.zeros(self.M)
        return 0.5 * self.sigmas * sq + self.shifts

    def project(self, x):
        out = np.empty_like(x)
        for i, c in enumerate(self.components):
            out[self.offsets[i]:self.offsets[i + 1]] = c.feasible_set.project(self.block(x, i))
        return out

    def contains(self, x, tol=1e-9):
        return all(c.feasible_set.contains(self.block(x, i), tol)
                   for i, c in enumerate(self.components))


def _closed_form_kind(comp):
    obj, X = comp.objective, comp.feasible_set
    if comp.closed_form is not None:
        return "user"
    if obj.l1_params(1) is not None and X.separable:
        return "l1"
    if obj.kind == "zero":
        return "projection"
    if isinstance(obj, QuadraticObjective) and isinstance(X, WholeSpace):
        return "linear"
    return None


def validate(problem):
    """Check structural invariants and resolve derived per-component data.

    Returns the same problem object, now marked as validated. Errors are
    :class:`ValidationError` instances naming the offending component.
    """
    if not isinstance(problem, Problem):
        raise TypeError(f"expected a Problem, got {type(problem).__name__}")
    if problem.validated:
        return problem
    comps = problem.components
    if len(comps) == 0:
        raise ValidationError("problem needs at least one component")
    ratio = check_scalar(problem.shift_ratio, "shift_ratio")
    if not 0.0 < ratio < 1.0:
        raise ValidationError(f"shift_ratio must lie in (0, 1), got {ratio}")

    m = problem.m
    mats, bs, prox, sizes, kinds = [], [], [], [], []
    for i, c in enumerate(comps):
        if not isinstance(c, ComponentSpec):
            raise ValidationError(f"expected ComponentSpec, got {type(c).__name__}", i)
        if not isinstance(c.objective, Objective):
            raise ValidationError("objective must be an Objective instance", i)
        if not isinstance(c.feasible_set, FeasibleSet):
            raise ValidationError("feasible_set must be a FeasibleSet instance", i)
        A = check_matrix(c.A, "A", component=i)
        if m is None:
            m = A.shape[0]
        if A.shape[0] != m:
            raise ValidationError(f"A has {A.shape[0]} rows but the problem has m={m}", i)
        n_i = A.shape[1]
        if n_i == 0:
            raise ValidationError("block has no variables", i)
        b = np.zeros(m) if c.b is None else check_vector(c.b, "b", m, component=i)
        c.objective.check_dim(n_i, i)
        X = c.feasible_set
        X.check_dim(n_i, i)
        if isinstance(c.objective, AbsObjective) and not X.separable:
            raise ValidationError("abs objective is only supported on box, orthant or whole-space sets", i)
        if isinstance(c.objective, LogUtilityObjective):
            lo = X.bounds(n_i)[0] if X.separable else None
            if lo is None or np.any(lo < 0):
                raise ValidationError("log-utility objective requires a subset of the nonnegative orthant", i)

        sigma = check_scalar(c.sigma, "sigma", component=i)
        if sigma <= 0:
            raise ValidationError(f"sigma must be positive, got {sigma}", i)
        if c.center is None:
            center = X.project(np.zeros(n_i))
        else:
            center = check_vector(c.center, "center", n_i, component=i)
        if not X.contains(center, 1e-10):
            raise ValidationError("prox center is not in the feasible set", i)

        if X.bounded:
            sup_sq = X.sup_sq_dist(center)
            radius = float(np.sqrt(sup_sq))
        else:
            if c.radius is None:
                raise ValidationError("unbounded feasible set needs a declared bounding radius", i)
            if isinstance(c.radius, str):
                if c.radius != "auto":
                    raise ValidationError(f"unknown radius option {c.radius!r}", i)
                radius = 10.0 * (1.0 + float(np.linalg.norm(center)))
            else:
                radius = check_scalar(c.radius, "radius", component=i)
                if radius <= 0:
                    raise ValidationError(f"bounding radius must be positive, got {radius}", i)
            sup_sq = radius * radius
        sup = 0.5 * sigma * sup_sq

        if isinstance(c.shift, str):
            if c.shift != "auto":
                raise ValidationError(f"unknown shift option {c.shift!r}", i)
            # r = ratio * (sup + r)  =>  r = ratio / (1 - ratio) * sup
            shift = ratio / (1.0 - ratio) * sup
            if shift <= 0:
                raise ValidationError("auto shift is zero because the feasible set is a single point; "
                                      "give an explicit positive shift", i)
        else:
            shift = check_scalar(c.shift, "shift", component=i)
            if shift <= 0:
                raise ValidationError(f"prox shift r must be positive, got {shift}", i)
        prox.append(ProxData(center=center, sigma=sigma, shift=shift, D=sup + shift,
                             sup=sup, radius=radius))
        mats.append(A)
        bs.append(b)
        sizes.append(n_i)
        kinds.append(_closed_form_kind(c))

    problem.m = int(m)
    problem.mats = tuple(mats)
    problem.bs = tuple(bs)
    problem.prox = tuple(prox)
    problem.sizes = np.array(sizes, dtype=np.int64)
    problem.offsets = np.concatenate(([0], np.cumsum(sizes))).astype(np.int64)
    problem.n = int(problem.offsets[-1])
    problem.b = np.sum(np.vstack(bs), axis=0) if bs else np.zeros(m)
    problem.closed_forms = tuple(kinds)
    problem.center = np.concatenate([p.center for p in prox])
    problem.sigmas = np.array([p.sigma for p in prox])
    problem.shifts = np.array([p.shift for p in prox])
    problem.D = np.array([p.D for p in prox])
    problem.component_of = np.repeat(np.arange(len(comps)), sizes)

    any_sparse = any(sp.issparse(A) for A in mats)
    if any_sparse and m >= _SPARSE_MIN_SHAPE and problem.n >= _SPARSE_MIN_SHAPE:
        problem.A_full = sp.hstack([sp.csc_matrix(A) for A in mats], format="csc")
    else:
        problem.A_full = np.hstack([A.toarray() if sp.issparse(A) else A for A in mats])
    problem.A_full_T = problem.A_full.T.tocsr() if sp.issparse(problem.A_full) else problem.A_full.T
    problem.validated = True
    return problem


@dataclass(frozen=True)
class ProblemConstants:
    """Derived scalars shared by every algorithm.

    ``sum_A2_sigma`` is ``sum_i ||A_i||^2 / sigma_i`` (so ``L^g(b1) =
    sum_A2_sigma / b1``) and ``sum_A2`` is ``sum_i ||A_i||^2``.
    """

    M: int
    L_A: float
    D_X: float
    p_X: float
    D_sigma: float
    C_d: float
    norm_A: float
    norms_A: np.ndarray
    alpha_star: float
    sum_sigma: float
    sum_A2_sigma: float
    sum_A2: float


def compute_constants(problem):
    """Constants ``L_A``, ``D_X``, ``p*_X``, ``D_sigma``, ``C_d``, ``||A||`` and ``alpha*``.

    Cached on the problem; repeated calls return the same object.
    """
    if not problem.validated:
        validate(problem)
    cached = problem._cache.get("constants")
    if cached is not None:
        return cached
    norms = np.array([spectral_norm(A) for A in problem.mats])
    sig = problem.sigmas
    ratios = norms ** 2 / sig
    M = problem.M
    L_A = float(M * np.max(ratios))
    D_X = float(np.sum(problem.D))
    p_X = float(np.sum(problem.shifts))
    D_sigma = float(np.sqrt(2.0 * np.sum(problem.D / sig)))
    norm_A = spectral_norm(problem.A_full)
    r_c = problem.residual(problem.center)
    C_d = float(norm_A ** 2 * D_sigma + np.linalg.norm(problem.A_full_T @ r_c))
    consts = ProblemConstants(
        M=M, L_A=L_A, D_X=D_X, p_X=p_X, D_sigma=D_sigma, C_d=C_d, norm_A=float(norm_A),
        norms_A=norms, alpha_star=p_X / D_X, sum_sigma=float(np.sum(sig)),
        sum_A2_sigma=float(np.sum(ratios)), sum_A2=float(np.sum(norms ** 2)))
    problem._cache["constants"] = consts
    return consts


__all__ = ["ComponentSpec", "Problem", "ProxData", "ProblemConstants", "validate",
           "compute_constants", "Box", "Ball", "NonNegative", "WholeSpace", "CustomSet"]
