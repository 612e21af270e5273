"""Problem data model: sets, objectives, components and derived constants."""

from .linalg import ConvergenceError, spectral_norm
from .objectives import (AbsObjective, LogUtilityObjective, Objective, QuadraticObjective,
                         SmoothObjective, ZeroObjective)
from .problem import (ComponentSpec, Problem, ProblemConstants, ProxData, compute_constants,
                      validate)
from .sets import Ball, Box, CustomSet, FeasibleSet, NonNegative, WholeSpace

__all__ = [
    "AbsObjective", "Ball", "Box", "ComponentSpec", "ConvergenceError", "CustomSet",
    "FeasibleSet", "LogUtilityObjective", "NonNegative", "Objective", "Problem",
    "ProblemConstants", "ProxData", "QuadraticObjective", "SmoothObjective", "WholeSpace",
    "ZeroObjective", "compute_constants", "spectral_norm", "validate",
]
