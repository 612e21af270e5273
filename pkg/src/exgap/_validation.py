"""Input validation helpers shared by the model, solvers and estimators."""

import numbers

import numpy as np
import scipy.sparse as sp


class ValidationError(ValueError):
    """Raised when problem data violates a structural requirement.

    ``component`` carries the offending component index when the error is
    attributable to a single block.
    """

    def __init__(self, message, component=None):
        if component is not None:
            message = f"component {component}: {message}"
        super().__init__(message)
        self.component = component


def check_scalar(value, name, *, lower=None, strict=False, component=None):
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise ValidationError(f"{name} must be a real number, got {value!r}", component)
    value = float(value)
    if not np.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value}", component)
    if lower is not None:
        if strict and value <= lower:
            raise ValidationError(f"{name} must be > {lower}, got {value}", component)
        if not strict and value < lower:
            raise ValidationError(f"{name} must be >= {lower}, got {value}", component)
    return value


def check_vector(x, name, size=None, *, component=None, allow_inf=False):
    """Return ``x`` as a 1-D float64 array, checking length and finiteness."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {arr.shape}", component)
    if size is not None and arr.shape[0] != size:
        raise ValidationError(f"{name} must have length {size}, got {arr.shape[0]}", component)
    bad = np.isnan(arr) if allow_inf else ~np.isfinite(arr)
    if bad.any():
        raise ValidationError(f"{name} contains non-finite entries", component)
    return arr


def check_matrix(A, name, *, component=None):
    """Return ``A`` as a 2-D float64 ndarray or a CSC sparse matrix."""
    if sp.issparse(A):
        A = sp.csc_matrix(A, dtype=np.float64)
        A.sort_indices()
        if not np.all(np.isfinite(A.data)):
            raise ValidationError(f"{name} contains non-finite entries", component)
        return A
    # contiguous copies keep products independent of how the caller sliced the data
    arr = np.ascontiguousarray(A, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be two-dimensional, got shape {arr.shape}", component)
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries", component)
    return arr


def check_problem(problem):
    """Validate ``problem`` unless it already went through :func:`validate`."""
    from .model.problem import Problem, validate

    if not isinstance(problem, Problem):
        raise TypeError(f"expected a Problem, got {type(problem).__name__}")
    return problem if problem.validated else validate(problem)
