"""Excessive-gap decomposition methods."""

from .drivers import fixed_beta1_constants, run, run_algorithm1, run_algorithm2, run_fixed_beta1
from .schedule import (GOLDEN_TAU0, PRIMAL_TAU0, compute_C0, compute_Qk, compute_Rk, eta,
                       initial_delta, tau_bounds, update_tau_dual, update_tau_fixed,
                       update_tau_primal, xi)
from .schemes import (Context, SchemeViolation, StepResult, init_point, make_context,
                      prox_linear_step, scheme_Sd, scheme_Sp)
from .state import (CONVERGED, MAXITER, NUMERICAL_FAILURE, SUBPROBLEM_FAILURE, TRACE_COLUMNS,
                    Iterate, SchedulerState, SolveOptions, SolveReport, TraceRow,
                    write_trace_csv)

__all__ = [
    "CONVERGED", "Context", "GOLDEN_TAU0", "Iterate", "MAXITER", "NUMERICAL_FAILURE",
    "PRIMAL_TAU0", "SUBPROBLEM_FAILURE", "SchedulerState", "SchemeViolation", "SolveOptions",
    "SolveReport", "StepResult", "TRACE_COLUMNS", "TraceRow", "compute_C0", "compute_Qk",
    "compute_Rk", "eta", "fixed_beta1_constants", "init_point", "initial_delta",
    "make_context", "prox_linear_step", "run", "run_algorithm1", "run_algorithm2",
    "run_fixed_beta1", "scheme_Sd", "scheme_Sp", "tau_bounds", "update_tau_dual",
    "update_tau_fixed", "update_tau_primal", "write_trace_csv", "xi",
]
