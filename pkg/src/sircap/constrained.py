"""Optimal quarantine timing under the infection cap.

When the cap-free optimum would overshoot the cap, the solved policy
has four phases: free dynamics until the infected fraction reaches the
cap, a holding arc that rides the cap (sigma = 1/x), one strict
quarantine started at the arc exit t2, and free dynamics to the
horizon.  The arc entry is forced to the first cap hit; the exit time
is located through the sign of the exit gain

    w_b(t2) = integral over the strict phase of (sigma_f*x - 1)/y,

with the strict-phase duration pinned to its admissible maximum
G(t2) = min(budget bound F(t2), horizon T - t2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend as kernels
from .dynamics import Trajectory, integrate, locate_on_trajectory
from .errors import ArcOverrun, BracketError, DomainError
from .finalsize import final_susceptible
from .model import ControlSchedule, EpidemicParams
from .numerics import bisect, simpson_uniform, uniform_mesh
from .unconstrained import (ROOT_TOL, UnconstrainedPolicy, _free_path,
                            solve_unconstrained)

__all__ = ["RegionGeometry", "ConstrainedPolicy", "cap_hitting_time",
           "compute_geometry", "duration_budget", "duration_allowed",
           "exit_gain", "solve_constrained", "objective_mu_derivative",
           "border_objective_derivative"]

CASE_GUARD = 1e-9     # tie band at case thresholds, toward the lower case
CAP_TIE = 1e-9        # peak-vs-cap comparison band, toward the cap-free case


@dataclass(frozen=True)
class RegionGeometry:
    """Characteristic times of the cap-riding arc, all for a fixed entry.

    t1       arc entry: first cap hit of the free path
    x_entry  susceptible fraction at entry
    t_m      latest point the arc can reach (x falls to 1/sigma_f), capped
             at the horizon
    t_f      latest admissible arc exit (budget bound still nonnegative)
    t_c      crossover below which the budget bound is the binding limit
             on the quarantine duration and above which the horizon is
    s0       optional diagnostic: exit time below which the full-budget
             quarantine still ends above the herd level
    """

    t1: float
    x_entry: float
    t_m: float
    t_f: float
    t_c: float
    s0: float | None = None


@dataclass(frozen=True)
class ConstrainedPolicy:
    """Solved capped policy.

    In the cap-free case (label "1.x") t1 == t2 and the schedule has no
    holding arc.  ``hypothesis_ok`` reports the structural assumptions
    the construction relies on (arc exits above the herd level, final
    state below the cap); a False value flags the result as unverified
    rather than aborting.
    """

    t1: float
    t2: float
    mu: float
    case_label: str
    x_inf_achieved: float
    schedule: ControlSchedule
    geometry: RegionGeometry | None
    unconstrained: UnconstrainedPolicy
    y_max: float
    budget_slack: float
    feasible: bool
    hypothesis_ok: bool
    notes: tuple[str, ...] = ()


def cap_hitting_time(params: EpidemicParams, step: float = 0.01,
                     root_tol: float = ROOT_TOL) -> float | None:
    """First upward crossing of the cap by the free path, or None when the
    cap-free optimal trajectory never exceeds the cap (tie resolves to None)."""
    from .unconstrained import unconstrained_peak
    _, y_max = unconstrained_peak(params, step, root_tol)
    if y_max <= params.cap + CAP_TIE:
        return None
    free = _free_path(params, step)
    t_hit = locate_on_trajectory(free, "y_hits_cap_rising", (0.0, params.horizon),
                                 tol=root_tol)
    if t_hit is None:
        raise BracketError("cap-free peak exceeds the cap but the free path "
                           "never crosses it; inconsistent state")
    return t_hit


def compute_geometry(params: EpidemicParams, step: float = 0.01,
                     root_tol: float = ROOT_TOL, with_s0: bool = False,
                     t1: float | None = None) -> RegionGeometry:
    """Characteristic times for the capped case (requires the cap to bind)."""
    if t1 is None:
        t1 = cap_hitting_time(params, step, root_tol)
        if t1 is None:
            raise DomainError("cap never binds; no arc geometry to compute")
    free = _free_path(params, step)
    x1 = free.x_at(t1)
    # entering with y rising forces sigma_f * x > 1 there
    assert params.sigma_f * x1 > 1.0, "cap reached after the herd threshold"
    T = params.horizon
    g, cap = params.gamma, params.cap
    t_m = min(t1 + (x1 - params.herd_level) / (g * cap), T)
    geo = RegionGeometry(t1, x1, t_m, t_m, t_m)
    F = lambda t2: duration_budget(params, geo, t2)
    if F(t_m) >= 0.0:
        t_f = t_m
    else:
        t_f = bisect(F, t1, t_m, root_tol)
    over = lambda t2: F(t2) - (T - t2)   # increasing in t2
    if over(t1) >= 0.0:
        t_c = t1
    elif over(t_f) <= 0.0:
        t_c = t_f
    else:
        t_c = bisect(over, t1, t_f, root_tol)
    s0 = None
    if with_s0:
        s0 = _herd_exit_point(params, geo, t_c, step, root_tol)
    return RegionGeometry(t1, x1, t_m, t_f, t_c, s0)


def duration_budget(params: EpidemicParams, geom: RegionGeometry, t2: float) -> float:
    """Maximum strict-quarantine duration the control budget leaves after
    riding the cap until t2; decreases from tau at the arc entry."""
    if t2 < geom.t1 - 1e-9:
        raise DomainError(f"t2={t2} precedes the arc entry {geom.t1}")
    if t2 > geom.t_m + 1e-9:
        raise ArcOverrun(f"t2={t2} beyond the arc end {geom.t_m}")
    ds = params.sigma_s - params.sigma_f
    gk = params.gamma * params.cap
    dt = t2 - geom.t1
    return params.tau + params.sigma_f * dt / ds + math.log1p(-gk * dt / geom.x_entry) / (gk * ds)


def duration_allowed(params: EpidemicParams, geom: RegionGeometry, t2: float) -> float:
    """min(budget bound, time to horizon): the admissible maximum duration."""
    return min(duration_budget(params, geom, t2), params.horizon - t2)


def _arc_state(params: EpidemicParams, geom: RegionGeometry, t2: float) -> tuple[float, float]:
    """(x, y) on the cap arc at exit time t2 (closed form: y == cap)."""
    return geom.x_entry - params.gamma * params.cap * (t2 - geom.t1), params.cap


def _strict_phase(params: EpidemicParams, geom: RegionGeometry, t2: float,
                  duration: float, step: float):
    """Path of the strict phase [t2, t2+duration] from the arc exit state."""
    n, h = uniform_mesh(duration, step, even=True)
    x2, y2 = _arc_state(params, geom, t2)
    if n == 0:
        return np.array([x2]), np.array([y2]), 0.0
    xs, ys, _ = kernels.rk4_const(x2, y2, 0.0, params.sigma_s, params.gamma, h, n)
    return xs, ys, h


def exit_gain(params: EpidemicParams, geom: RegionGeometry, t2: float,
              step: float = 0.01) -> float:
    """Marginal value of riding the cap past t2 before quarantining, with
    the duration pinned to its admissible maximum."""
    window = duration_allowed(params, geom, t2)
    if window <= 0.0:
        return 0.0
    xs, ys, h = _strict_phase(params, geom, t2, window, step)
    return simpson_uniform((params.sigma_f * xs - 1.0) / ys, h)


def _herd_exit_point(params, geom, t_c, step, root_tol) -> float:
    """Exit time below which the full-budget strict phase still ends with
    x above the herd level (diagnostic s0)."""
    def end_margin(t2: float) -> float:
        xs, _, _ = _strict_phase(params, geom, t2, duration_budget(params, geom, t2), step)
        return float(xs[-1]) - params.herd_level
    if end_margin(geom.t1) <= 0.0:
        return geom.t1
    if end_margin(t_c) >= 0.0:
        return t_c
    return bisect(end_margin, geom.t1, t_c, root_tol)


def solve_constrained(params: EpidemicParams, step: float = 0.01,
                      root_tol: float = ROOT_TOL) -> ConstrainedPolicy:
    """Optimal policy under the cap.

    Cap slack: the cap-free optimum is returned unchanged (case "1.x").
    Cap binding: the arc entry is the first cap hit and the exit t2 is
    dispatched on the exit gain at the crossover t_c:
      2.1  gain(t_c) <= 0:      exit at the zero of the gain, full budget
      2.2  0 < gain(t_c) <= 1/(gamma*cap): exit at t_c
      2.3  gain(t_c) > 1/(gamma*cap): exit where the gain meets
           1/(gamma*cap); the quarantine then runs to the horizon
    Threshold ties resolve toward the lower-numbered case (1e-9 band).
    """
    unc = solve_unconstrained(params, step, root_tol)
    unc_traj = integrate(params, unc.schedule, step)
    _, y_peak = unc_traj.max_y()
    if y_peak <= params.cap + CAP_TIE:
        return _finish(params, unc.t_start, unc.t_start, unc.duration, unc.case_label,
                       None, unc, unc.schedule, unc_traj, step)

    geom = compute_geometry(params, step, root_tol)
    gain_c = exit_gain(params, geom, geom.t_c, step)
    inv = 1.0 / (params.gamma * params.cap)
    if gain_c <= CASE_GUARD:
        case = "2.1"
        if gain_c >= 0.0:
            t2 = geom.t_c        # zero sits at the crossover itself
        else:
            gain_1 = exit_gain(params, geom, geom.t1, step)
            if gain_1 <= 0.0:
                raise BracketError("exit gain not positive at the arc entry; "
                                   "contradicts the single-crossing structure")
            t2 = bisect(lambda t: exit_gain(params, geom, t, step),
                        geom.t1, geom.t_c, root_tol, fa=gain_1, fb=gain_c)
    elif gain_c <= inv + CASE_GUARD:
        case, t2 = "2.2", geom.t_c
    else:
        case = "2.3"
        t2 = bisect(lambda t: exit_gain(params, geom, t, step) - inv,
                    geom.t_c, geom.t_f, root_tol, fa=gain_c - inv)
    mu = max(duration_allowed(params, geom, t2), 0.0)
    schedule = ControlSchedule.four_phase(params, geom.t1, t2, mu, geom.x_entry)
    traj = integrate(params, schedule, step)
    return _finish(params, geom.t1, t2, mu, case, geom, unc, schedule, traj, step)


def _finish(params, t1, t2, mu, case, geom, unc, schedule, traj, step) -> ConstrainedPolicy:
    x_inf = final_susceptible(float(traj.x[-1]), float(traj.y[-1]), params.sigma_f).x_inf
    _, y_max = traj.max_y()
    slack = traj.budget_slack()
    feasible = y_max <= params.cap + 1e-6 and slack >= -1e-6
    notes: list[str] = []
    ok = True
    if geom is not None:
        # structural assumptions behind the construction
        x_exit = _arc_state(params, geom, t2)[0]
        if not x_exit > params.herd_level:
            ok = False
            notes.append(f"arc exit x={x_exit:.6f} not above herd level "
                         f"{params.herd_level:.6f}")
    if not traj.y[-1] < params.cap:
        ok = False
        notes.append(f"final infected fraction {traj.y[-1]:.6g} not below the cap")
    if not feasible:
        notes.append(f"infeasible: y_max={y_max:.8f}, budget slack={slack:.3e}")
    return ConstrainedPolicy(t1, t2, mu, case, x_inf, schedule, geom, unc,
                             y_max, slack, feasible, ok, tuple(notes))


def objective_mu_derivative(params: EpidemicParams, geom: RegionGeometry,
                            t2: float, mu: float, step: float = 0.01) -> float:
    """Derivative of the final susceptible fraction with respect to the
    quarantine duration; positive everywhere in the admissible region,
    which is why optimal durations sit on the upper border."""
    xs, ys, _ = _strict_phase(params, geom, t2, mu, step)
    x3, y3 = float(xs[-1]), float(ys[-1])
    x_inf = final_susceptible(x3, y3, params.sigma_f).x_inf
    return (params.gamma * y3 * (params.sigma_f - params.sigma_s)
            * x_inf / (1.0 - params.sigma_f * x_inf))


def border_objective_derivative(params: EpidemicParams, geom: RegionGeometry,
                                t2: float, step: float = 0.01) -> float:
    """One-sided derivative along the upper border mu = G(t2) of the
    admissible region; undefined exactly at the crossover t_c where the
    border switches from the budget bound to the horizon bound."""
    from .errors import UndefinedAtKink
    if abs(t2 - geom.t_c) < 1e-9 and geom.t1 < geom.t_c < geom.t_f:
        raise UndefinedAtKink(f"border derivative has a kink at t2={geom.t_c}")
    window = duration_allowed(params, geom, t2)
    xs, ys, _ = _strict_phase(params, geom, t2, window, step)
    x2, y3 = float(xs[0]), float(ys[-1])
    x_inf = final_susceptible(float(xs[-1]), y3, params.sigma_f).x_inf
    prefactor = (params.gamma ** 2 * y3 * params.cap * (1.0 - params.sigma_s * x2)
                 * x_inf / (x2 * (1.0 - params.sigma_f * x_inf)))
    gain = exit_gain(params, geom, t2, step)
    if t2 < geom.t_c:
        return prefactor * gain
    return prefactor * (gain - 1.0 / (params.gamma * params.cap))
