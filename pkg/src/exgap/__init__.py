"""Inexact excessive-gap dual decomposition for separable convex programs."""

from .model import (AbsObjective, Ball, Box, ComponentSpec, CustomSet, LogUtilityObjective,
                    NonNegative, Problem, QuadraticObjective, SmoothObjective, WholeSpace,
                    ZeroObjective, compute_constants, validate)
from .egap import SolveOptions, SolveReport, run, run_algorithm1, run_algorithm2, run_fixed_beta1

__version__ = "0.1.0"

__all__ = [
    "AbsObjective", "Ball", "Box", "ComponentSpec", "CustomSet", "LogUtilityObjective",
    "NonNegative", "Problem", "QuadraticObjective", "SmoothObjective", "SolveOptions",
    "SolveReport", "WholeSpace", "ZeroObjective", "compute_constants", "run",
    "run_algorithm1", "run_algorithm2", "run_fixed_beta1", "validate",
]
