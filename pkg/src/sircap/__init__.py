"""Optimal quarantine scheduling for SIR epidemics under a hospital cap.

The solver computes the reproduction-number schedule that maximizes the
final susceptible fraction subject to an infection cap and a budget on
cumulative control effort, and cross-checks it against a brute-force
search and a costate (switching-function) reconstruction.
"""

__version__ = "0.1.0"

from ._backend import BACKEND as kernel_backend
from .constrained import (ConstrainedPolicy, RegionGeometry, cap_hitting_time,
                          compute_geometry, duration_allowed, duration_budget,
                          exit_gain, solve_constrained)
from .dynamics import Event, Trajectory, boundary_x, integrate, locate_event
from .errors import (ArcOverrun, BracketError, DomainError, InvalidParams,
                     NumericalFailure, ScheduleError, SircapError, UndefinedAtKink)
from .finalsize import (FinalSizeResult, final_susceptible, final_susceptible_dx,
                        final_susceptible_dy, lambert_w0, sir_invariant)
from .model import (BoundaryArc, ConstantSigma, ControlSchedule, EpidemicParams,
                    evaluate_control)
from .oracle import SearchGrid, SweepProfile, grid_search, sweep_t1
from .pmp import (AdjointPath, PmpReport, check_switching_structure,
                  integrate_adjoint, terminal_costate)
from .unconstrained import (UnconstrainedPolicy, late_start_threshold,
                            postponement_gain, solve_unconstrained,
                            unconstrained_peak)

__all__ = [
    "kernel_backend", "EpidemicParams", "ConstantSigma", "BoundaryArc",
    "ControlSchedule", "evaluate_control", "Event", "Trajectory", "integrate",
    "locate_event", "boundary_x", "FinalSizeResult", "lambert_w0",
    "sir_invariant", "final_susceptible", "final_susceptible_dx",
    "final_susceptible_dy", "UnconstrainedPolicy", "postponement_gain",
    "late_start_threshold", "solve_unconstrained", "unconstrained_peak",
    "RegionGeometry", "ConstrainedPolicy", "cap_hitting_time", "compute_geometry",
    "duration_budget", "duration_allowed", "exit_gain", "solve_constrained",
    "SearchGrid", "SweepProfile", "grid_search", "sweep_t1", "AdjointPath",
    "PmpReport", "terminal_costate", "integrate_adjoint",
    "check_switching_structure", "SircapError", "InvalidParams", "ScheduleError",
    "DomainError", "ArcOverrun", "NumericalFailure", "BracketError",
    "UndefinedAtKink",
]
