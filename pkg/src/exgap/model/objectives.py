"""Objective oracles ``phi_i`` for a single component."""

import numpy as np
import scipy.sparse as sp

from .._validation import ValidationError, check_scalar, check_vector


class Objective:
    """Base oracle.

    ``smooth`` objectives expose :meth:`grad` and a global Lipschitz constant
    of the gradient on the feasible set (``lipschitz``). Objectives that are
    separable per coordinate as ``sum_j w_j |x_j - a_j|`` expose
    :meth:`l1_params`, which enables the closed-form subproblem solver.
    """

    smooth = False
    kind = "abstract"
    # gradient only defined on the feasible set, so extrapolated points are projected
    domain_restricted = False

    def value(self, x):
        raise NotImplementedError

    def grad(self, x):
        raise NotImplementedError(f"{type(self).__name__} has no gradient")

    @property
    def lipschitz(self):
        return None

    def l1_params(self, n):
        return None

    def check_dim(self, n, component=None):
        pass


class ZeroObjective(Objective):
    """``phi(x) = 0``."""

    smooth = True
    kind = "zero"

    def __repr__(self):
        return "ZeroObjective()"

    def value(self, x):
        return 0.0

    def grad(self, x):
        return np.zeros_like(x)

    @property
    def lipschitz(self):
        return 0.0

    def l1_params(self, n):
        return np.zeros(n), np.zeros(n)


class AbsObjective(Objective):
    """Weighted shifted absolute value ``sum_j weight_j * |x_j - shift_j|``."""

    kind = "abs"

    def __init__(self, weight=1.0, shift=0.0):
        self.weight = check_vector(weight, "abs weight")
        self.shift = check_vector(shift, "abs shift")
        if np.any(self.weight < 0):
            raise ValidationError("abs weights must be nonnegative")

    def __repr__(self):
        return f"AbsObjective(n={max(self.weight.size, self.shift.size)})"

    def check_dim(self, n, component=None):
        for name, arr in (("weight", self.weight), ("shift", self.shift)):
            if arr.size not in (1, n):
                raise ValidationError(
                    f"abs {name} has length {arr.size}, block has {n} variables", component)

    def l1_params(self, n):
        return np.broadcast_to(self.weight, (n,)), np.broadcast_to(self.shift, (n,))

    def value(self, x):
        return float(np.sum(self.weight * np.abs(x - self.shift)))


class QuadraticObjective(Objective):
    """``phi(x) = 0.5 x'Qx + q'x`` with ``Q`` symmetric positive semidefinite."""

    smooth = True
    kind = "quadratic"

    def __init__(self, Q, q):
        if sp.issparse(Q):
            self.Q = sp.csr_matrix(Q, dtype=np.float64)
            dense = self.Q.toarray()
        else:
            self.Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
            dense = self.Q
        if dense.shape[0] != dense.shape[1]:
            raise ValidationError(f"Q must be square, got {dense.shape}")
        if not np.allclose(dense, dense.T, rtol=1e-12, atol=1e-14):
            raise ValidationError("Q must be symmetric")
        self.q = check_vector(q, "q", dense.shape[0])
        eig = np.linalg.eigvalsh(dense) if dense.size else np.zeros(0)
        if eig.size and eig[0] < -1e-10 * max(1.0, abs(eig[-1])):
            raise ValidationError(f"Q is not positive semidefinite (min eigenvalue {eig[0]:.3e})")
        self._lip = float(max(eig[-1], 0.0)) if eig.size else 0.0
        self._dense = dense

    def __repr__(self):
        return f"QuadraticObjective(n={self.q.size})"

    def check_dim(self, n, component=None):
        if self.q.size != n:
            raise ValidationError(f"quadratic term has size {self.q.size}, block has {n}", component)

    @property
    def dense_Q(self):
        return self._dense

    def value(self, x):
        return float(0.5 * np.dot(x, self.Q @ x) + np.dot(self.q, x))

    def grad(self, x):
        return self.Q @ x + self.q

    @property
    def lipschitz(self):
        return self._lip


class LogUtilityObjective(Objective):
    """``0.5 (x - x0)' diag(d) (x - x0) - w * ln(1 + c'x)`` with ``c >= 0``.

    Convex on the nonnegative orthant; the gradient Lipschitz constant
    ``max(d) + w ||c||^2`` holds there because ``c'x >= 0``.
    """

    smooth = True
    kind = "log"
    domain_restricted = True

    def __init__(self, d, x0, w, c):
        self.d = check_vector(d, "d")
        self.x0 = check_vector(x0, "x0", self.d.size)
        self.c = check_vector(c, "c", self.d.size)
        self.w = check_scalar(w, "w", lower=0.0)
        if np.any(self.d < 0) or np.any(self.c < 0):
            raise ValidationError("log-utility objective needs d >= 0 and c >= 0")

    def __repr__(self):
        return f"LogUtilityObjective(n={self.d.size})"

    def check_dim(self, n, component=None):
        if self.d.size != n:
            raise ValidationError(f"log-utility data has size {self.d.size}, block has {n}",
                                  component)

    def value(self, x):
        dx = x - self.x0
        return float(0.5 * np.dot(self.d * dx, dx) - self.w * np.log1p(np.dot(self.c, x)))

    def grad(self, x):
        return self.d * (x - self.x0) - (self.w / (1.0 + np.dot(self.c, x))) * self.c

    def hessian(self, x):
        s = 1.0 + np.dot(self.c, x)
        return np.diag(self.d) + (self.w / (s * s)) * np.outer(self.c, self.c)

    @property
    def lipschitz(self):
        return float(np.max(self.d, initial=0.0) + self.w * np.dot(self.c, self.c))


class SmoothObjective(Objective):
    """User-supplied smooth convex objective."""

    smooth = True
    kind = "smooth"

    def __init__(self, fun, grad, lipschitz):
        self._fun = fun
        self._grad = grad
        self._lip = check_scalar(lipschitz, "lipschitz", lower=0.0)

    def value(self, x):
        return float(self._fun(x))

    def grad(self, x):
        return np.asarray(self._grad(x), dtype=np.float64)

    @property
    def lipschitz(self):
        return self._lip
