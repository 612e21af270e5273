"""Instance generators, stopping rules, performance profiles and the command line."""

from .generators import (GeneratorSpec, generate_basis_pursuit, generate_nonlinear,
                         generate_nonsmooth, generate_qp)
from .io import read_problem, write_problem
from .profile import (ProfileCurve, RunRecord, performance_profile, performance_ratios,
                      plot_profile, write_profile_csv)
from .stopping import StopDecision, rpfgap, stagnated, stopping_check

__all__ = [
    "GeneratorSpec", "ProfileCurve", "RunRecord", "StopDecision", "generate_basis_pursuit",
    "generate_nonlinear", "generate_nonsmooth", "generate_qp", "performance_profile",
    "performance_ratios", "plot_profile", "read_problem", "rpfgap", "stagnated",
    "stopping_check", "write_problem", "write_profile_csv",
]
