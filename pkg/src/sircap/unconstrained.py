"""Optimal quarantine timing when the infection cap is ignored.

The policy family is bang-bang: free dynamics, one strict-quarantine
interval, free dynamics again.  The start time is bracketed by the sign
of the postponement gain

    w(t) = integral over the quarantine window of (sigma_f*x - 1)/y,

which is positive while delaying the start still improves the final
size.  Near the end of the horizon the window is the remaining time
[t, T] and the relevant threshold becomes 1/(gamma*y(t)).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import _backend as kernels
from .dynamics import Trajectory, integrate
from .model import ControlSchedule, EpidemicParams
from .numerics import bisect, simpson_uniform, uniform_mesh

__all__ = ["UnconstrainedPolicy", "postponement_gain", "late_start_threshold",
           "solve_unconstrained", "unconstrained_peak"]

ROOT_TOL = 1e-6


@dataclass(frozen=True)
class UnconstrainedPolicy:
    """Solved cap-free policy: quarantine on [t_start, t_start + duration]."""

    t_start: float
    duration: float
    case_label: str          # "1.1" .. "1.4"
    x_inf_achieved: float
    schedule: ControlSchedule


@lru_cache(maxsize=32)
def _free_path(params: EpidemicParams, step: float) -> Trajectory:
    """Trajectory under sigma_f on the whole horizon (shared by the w
    evaluations; callers must treat it as read-only)."""
    return integrate(params, ControlSchedule.constant(params.sigma_f, params.horizon), step)


def _window_gain(params: EpidemicParams, free: Trajectory, t: float,
                 window: float, step: float) -> float:
    """Simpson integral of (sigma_f*x - 1)/y over the strict phase
    [t, t+window], started from the free state at t."""
    n, h = uniform_mesh(window, step, even=True)
    if n == 0:
        return 0.0
    x, y, _ = free.state_at(t)
    xs, ys, _ = kernels.rk4_const(x, y, 0.0, params.sigma_s, params.gamma, h, n)
    return simpson_uniform((params.sigma_f * xs - 1.0) / ys, h)


def postponement_gain(params: EpidemicParams, t: float, step: float = 0.01,
                      free: Trajectory | None = None) -> float:
    """Marginal value of delaying the quarantine start past t.

    The quarantine window is tau long while it fits before the horizon
    and the remaining time [t, T] afterwards.  Zeroes of this function
    locate the optimal start time.
    """
    if free is None:
        free = _free_path(params, step)
    window = min(params.tau, params.horizon - t)
    return _window_gain(params, free, t, window, step)


def late_start_threshold(params: EpidemicParams, t: float, step: float = 0.01,
                         free: Trajectory | None = None) -> float:
    """Threshold 1/(gamma*y(t)) the gain is compared against once the
    quarantine would run into the horizon (t > T - tau)."""
    if free is None:
        free = _free_path(params, step)
    return 1.0 / (params.gamma * free.y_at(t))


def solve_unconstrained(params: EpidemicParams, step: float = 0.01,
                        root_tol: float = ROOT_TOL) -> UnconstrainedPolicy:
    """Optimal (start, duration) of the single strict-quarantine interval.

    Case dispatch on the sign pattern of the postponement gain w:
      1.1  w(0) <= 0:    start immediately, full budget tau
      1.2  w changes sign on [0, T-tau]: start at the zero, full budget
      1.3  w(T-tau) in (0, threshold]:   start at T-tau, full budget
      1.4  w(T-tau) > threshold: start where w meets the threshold; the
           quarantine then runs exactly to the horizon (duration < tau)
    Ties at the thresholds resolve toward the lower-numbered case.
    """
    T, tau = params.horizon, params.tau
    free = _free_path(params, step)
    w = lambda t: postponement_gain(params, t, step, free)
    w0 = w(0.0)
    if w0 <= 0.0:
        case, t0, mu = "1.1", 0.0, tau
    else:
        w_edge = w(T - tau)
        if w_edge <= 0.0:
            t0 = bisect(w, 0.0, T - tau, root_tol, fa=w0, fb=w_edge)
            case, mu = "1.2", tau
        elif w_edge <= late_start_threshold(params, T - tau, step, free):
            case, t0, mu = "1.3", T - tau, tau
        else:
            excess = lambda t: w(t) - late_start_threshold(params, t, step, free)
            t0 = bisect(excess, T - tau, T, root_tol)
            case, mu = "1.4", T - t0
    schedule = ControlSchedule.three_phase(params, t0, mu)
    tail = integrate(params, schedule, step)
    from .finalsize import final_susceptible
    x_inf = final_susceptible(float(tail.x[-1]), float(tail.y[-1]), params.sigma_f).x_inf
    return UnconstrainedPolicy(t0, mu, case, x_inf, schedule)


def unconstrained_peak(params: EpidemicParams, step: float = 0.01,
                       root_tol: float = ROOT_TOL) -> tuple[float, float]:
    """Time and value of the infection peak under the solved cap-free
    policy (the peak sits at the quarantine start whenever the epidemic
    is still growing there)."""
    policy = solve_unconstrained(params, step, root_tol)
    traj = integrate(params, policy.schedule, step)
    return traj.max_y()
