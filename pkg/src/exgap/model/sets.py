"""Feasible-set descriptors for the per-component constraints ``x_i in X_i``.

Each set knows how to project, test membership and, where the geometry
allows it, compute the minimum-norm element of ``g + N_X(x)``. The last one
is what the subproblem solvers use to certify suboptimality.
"""

import numpy as np

from .._validation import ValidationError, check_scalar, check_vector

# points this close (relative) to a ball boundary are treated as on it
_BALL_BOUNDARY_RTOL = 1e-12


class FeasibleSet:
    """Base class. Subclasses set ``bounded`` and ``separable``."""

    bounded = False
    separable = False
    kind = "abstract"

    def project(self, x):
        raise NotImplementedError

    def contains(self, x, tol=1e-12):
        raise NotImplementedError

    def sup_sq_dist(self, center):
        """``sup_{x in X} ||x - center||^2``; ``None`` for unbounded sets."""
        return None

    def min_norm_residual(self, x, g):
        """Minimum-norm element of ``g + N_X(x)``; ``None`` if not available."""
        return None

    def bounds(self, n):
        """Per-coordinate ``(lower, upper)`` arrays for separable sets."""
        raise NotImplementedError

    def check_dim(self, n, component=None):
        pass


class Box(FeasibleSet):
    """Axis-aligned box ``lower <= x <= upper`` (entries may be infinite)."""

    separable = True
    kind = "box"

    def __init__(self, lower, upper):
        self.lower = check_vector(lower, "lower", allow_inf=True)
        self.upper = check_vector(upper, "upper", allow_inf=True)
        if self.lower.shape != self.upper.shape:
            if self.lower.size == 1:
                self.lower = np.full(self.upper.shape, self.lower[0])
            elif self.upper.size == 1:
                self.upper = np.full(self.lower.shape, self.upper[0])
            else:
                raise ValidationError("box bounds have mismatched lengths")
        if np.any(self.lower > self.upper):
            raise ValidationError("box has lower > upper")
        self.bounded = bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))

    def __repr__(self):
        return f"Box(n={self.lower.size})"

    def check_dim(self, n, component=None):
        # scalar bounds apply to every coordinate of the block
        if self.lower.size == 1 and n > 1:
            self.lower = np.full(n, self.lower[0])
            self.upper = np.full(n, self.upper[0])
        if self.lower.size != n:
            raise ValidationError(
                f"box has {self.lower.size} bounds but the block has {n} variables", component)

    def bounds(self, n):
        return self.lower, self.upper

    def project(self, x):
        return np.clip(x, self.lower, self.upper)

    def contains(self, x, tol=1e-12):
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def sup_sq_dist(self, center):
        if not self.bounded:
            return None
        far = np.maximum(np.abs(self.lower - center), np.abs(self.upper - center))
        return float(np.dot(far, far))

    def min_norm_residual(self, x, g):
        r = g.copy()
        at_lo = x <= self.lower
        at_hi = x >= self.upper
        r[at_lo] = np.minimum(g[at_lo], 0.0)
        r[at_hi] = np.maximum(g[at_hi], 0.0)
        r[at_lo & at_hi] = 0.0
        return r


class NonNegative(FeasibleSet):
    """The nonnegative orthant."""

    separable = True
    kind = "nonneg"

    def __repr__(self):
        return "NonNegative()"

    def bounds(self, n):
        return np.zeros(n), np.full(n, np.inf)

    def project(self, x):
        return np.maximum(x, 0.0)

    def contains(self, x, tol=1e-12):
        return bool(np.all(x >= -tol))

    def min_norm_residual(self, x, g):
        r = g.copy()
        at_lo = x <= 0.0
        r[at_lo] = np.minimum(g[at_lo], 0.0)
        return r


class WholeSpace(FeasibleSet):
    """No constraint. A bounding radius must be declared on the component."""

    separable = True
    kind = "whole"

    def __repr__(self):
        return "WholeSpace()"

    def bounds(self, n):
        return np.full(n, -np.inf), np.full(n, np.inf)

    def project(self, x):
        return x

    def contains(self, x, tol=1e-12):
        return bool(np.all(np.isfinite(x)))

    def min_norm_residual(self, x, g):
        return g


class Ball(FeasibleSet):
    """Euclidean ball ``||x - center|| <= radius``."""

    bounded = True
    kind = "ball"

    def __init__(self, center, radius):
        self.center = check_vector(center, "ball center")
        self.radius = check_scalar(radius, "ball radius", lower=0.0)

    def __repr__(self):
        return f"Ball(n={self.center.size}, radius={self.radius})"

    def check_dim(self, n, component=None):
        if self.center.size != n:
            raise ValidationError(
                f"ball center has length {self.center.size} but the block has {n} variables",
                component)

    def project(self, x):
        d = x - self.center
        nrm = np.linalg.norm(d)
        if nrm <= self.radius:
            return x
        return self.center + (self.radius / nrm) * d

    def contains(self, x, tol=1e-12):
        return bool(np.linalg.norm(x - self.center) <= self.radius * (1.0 + tol) + tol)

    def sup_sq_dist(self, center):
        far = np.linalg.norm(center - self.center) + self.radius
        return float(far * far)

    def min_norm_residual(self, x, g):
        d = x - self.center
        nrm = np.linalg.norm(d)
        if self.radius == 0.0:
            return np.zeros_like(g)
        if nrm < self.radius * (1.0 - _BALL_BOUNDARY_RTOL):
            return g
        u = d / nrm
        lam = max(0.0, -float(np.dot(g, u)))
        return g + lam * u


class CustomSet(FeasibleSet):
    """User-supplied projector, optionally with a membership test.

    Parameters
    ----------
    projector : callable
        ``projector(x)`` returns the Euclidean projection of ``x``.
    contains : callable, optional
        Membership test; by default ``x`` is a member when it is a fixed
        point of the projector up to ``tol``.
    sup_sq_dist : callable, optional
        ``sup_sq_dist(center)`` for bounded sets.
    """

    kind = "custom"

    def __init__(self, projector, contains=None, sup_sq_dist=None):
        self._projector = projector
        self._contains = contains
        self._sup = sup_sq_dist
        self.bounded = sup_sq_dist is not None

    def project(self, x):
        return np.asarray(self._projector(x), dtype=np.float64)

    def contains(self, x, tol=1e-12):
        if self._contains is not None:
            return bool(self._contains(x))
        return bool(np.linalg.norm(self.project(x) - x) <= tol * (1.0 + np.linalg.norm(x)))

    def sup_sq_dist(self, center):
        return None if self._sup is None else float(self._sup(center))
