"""Brute-force verification of solved policies.

The oracle maximizes the final susceptible fraction by direct search
over the admissible policy lattice: integrate the system for every
(exit time, duration) pair, keep the feasible points, take the argmax,
then zoom the lattice around it twice.  No structure beyond feasibility
is assumed, which is what makes it a trustworthy cross-check of the
root-finding solver.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _backend as kernels
from .constrained import cap_hitting_time
from .dynamics import Trajectory, integrate
from .finalsize import final_susceptible
from .model import BoundaryArc, ConstantSigma, ControlSchedule, EpidemicParams
from .numerics import central_difference
from .unconstrained import _free_path

__all__ = ["SearchGrid", "SweepProfile", "grid_search", "sweep_t1",
           "central_difference"]

FEAS_TOL = 1e-6


@dataclass
class SearchGrid:
    """Result of one direct search.

    Each t2 column carries its own duration lattice, linspace(0, mu_max)
    with mu_max the point where the integrated budget runs out (or the
    horizon intervenes); the top of every column therefore sits exactly
    on the feasibility border, where the optimum lives.  ``mu_values``
    holds the border fractions shared by all columns.  ``rows`` is the
    coarse-pass surface, one (t2, mu, x_inf, feasible) row per lattice
    point in row-major (t2 outer) order.  ``best`` is the feasible argmax
    after the zoom passes, None when nothing is feasible.
    """

    t1_mode: str                    # "fixed_at_entry" or "swept"
    t1: float | None                # arc entry; None when the cap never binds
    t2_values: np.ndarray
    mu_values: np.ndarray
    rows: np.ndarray
    best: tuple[float, float, float] | None
    feasible_count: int
    spacing: tuple[float, float]    # final lattice spacing (dt2, max dmu)


@dataclass
class SweepProfile:
    """Best objective as a function of the arc entry time."""

    t1_values: np.ndarray
    x_inf: np.ndarray               # NaN where no feasible point exists
    best: tuple[float, float, float, float] | None   # (t1, t2, mu, x_inf)


def _prefix_running_max(prefix: Trajectory) -> np.ndarray:
    return np.maximum.accumulate(prefix.y)


def _eval_lattice(args) -> np.ndarray:
    """Evaluate one chunk of lattice points; returns (n, 4) rows."""
    (x2, y2, v2, t2, mu, horizon, step, sigma_s, sigma_f, gamma, cap,
     budget_floor, pre_ymax, pre_feasible) = args
    mu_eff = np.minimum(mu, np.maximum(horizon - t2, 0.0))
    tail = np.maximum(horizon - t2 - mu_eff, 0.0)
    n_s = np.maximum(np.ceil(mu_eff / step - 1e-9), 1).astype(np.int64)
    n_s[mu_eff <= 0.0] = 0
    h_s = np.where(n_s > 0, mu_eff / np.maximum(n_s, 1), 0.0)
    n_f = np.maximum(np.ceil(tail / step - 1e-9), 1).astype(np.int64)
    n_f[tail <= 0.0] = 0
    h_f = np.where(n_f > 0, tail / np.maximum(n_f, 1), 0.0)
    xT, yT, vT, ymax = kernels.policy_tail_batch(
        np.ascontiguousarray(x2), np.ascontiguousarray(y2), np.ascontiguousarray(v2),
        np.ascontiguousarray(n_s), np.ascontiguousarray(h_s),
        np.ascontiguousarray(n_f), np.ascontiguousarray(h_f),
        sigma_s, sigma_f, gamma)
    x_inf = np.array([final_susceptible(float(x), float(y), sigma_f).x_inf
                      for x, y in zip(xT, yT)])
    feasible = (pre_feasible
                & (t2 + mu <= horizon + 1e-9)
                & (np.maximum(ymax, pre_ymax) <= cap + FEAS_TOL)
                & (vT >= budget_floor - FEAS_TOL))
    return np.column_stack([t2, mu, x_inf, feasible.astype(float)])


def _search(params: EpidemicParams, prefix: Trajectory, t2_lo: float, t2_hi: float,
            mu_hi: float, resolution: tuple[int, int], refinements: int,
            step: float, workers: int):
    """Lattice search with zoom passes over t2 in [t2_lo, t2_hi]; each
    column's duration lattice spans [0, mu_max(t2)] where mu_max is
    where the accumulated budget (or the horizon) runs out."""
    runmax = _prefix_running_max(prefix)
    floor = params.budget_floor()
    T = params.horizon
    sf, ss = params.sigma_f, params.sigma_s
    n_t2, n_mu = resolution
    fractions = np.linspace(0.0, 1.0, n_mu)
    lo_t2, hi_t2 = t2_lo, t2_hi
    coarse_rows = None
    best = None
    for _ in range(refinements + 1):
        t2s = np.linspace(lo_t2, hi_t2, n_t2)
        x2c = np.array([prefix.x_at(t) for t in t2s])
        y2c = np.array([prefix.y_at(t) for t in t2s])
        v2c = np.array([prefix.v_at(t) for t in t2s])
        # budget left for the strict phase: v2 + ss*mu + sf*(T-t2-mu) >= floor
        mu_budget = (v2c + sf * (T - t2s) - floor) / (sf - ss)
        mu_max = np.clip(np.minimum(mu_budget, np.minimum(T - t2s, mu_hi)), 0.0, None)
        t2f = np.repeat(t2s, n_mu)
        muf = (mu_max[:, None] * fractions[None, :]).ravel()
        x2 = np.repeat(x2c, n_mu)
        y2 = np.repeat(y2c, n_mu)
        v2 = np.repeat(v2c, n_mu)
        k = np.minimum(np.searchsorted(prefix.t, t2f, side="right"),
                       len(runmax)) - 1
        pre_ymax = runmax[k]
        pre_feas = pre_ymax <= params.cap + FEAS_TOL
        args = (x2, y2, v2, t2f, muf, T, step, ss, sf,
                params.gamma, params.cap, floor, pre_ymax, pre_feas)
        if workers > 1:
            chunks = _split_args(args, workers)
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = np.vstack(list(pool.map(_eval_lattice, chunks)))
        else:
            rows = _eval_lattice(args)
        if coarse_rows is None:
            coarse_rows = rows
            coarse_axes = (t2s, fractions)
        feas = rows[:, 3] > 0.5
        if feas.any():
            j = int(np.argmax(np.where(feas, rows[:, 2], -np.inf)))
            best = (float(rows[j, 0]), float(rows[j, 1]), float(rows[j, 2]))
        if best is None:
            break
        # zoom: shrink the exit-time span tenfold around the argmax, clipped
        w_t2 = max((hi_t2 - lo_t2) / 10.0, 1e-9)
        lo_t2 = max(t2_lo, best[0] - 0.5 * w_t2)
        hi_t2 = min(t2_hi, best[0] + 0.5 * w_t2)
    spacing = ((hi_t2 - lo_t2) / max(n_t2 - 1, 1),
               float(mu_max.max()) / max(n_mu - 1, 1))
    n_feas = int((coarse_rows[:, 3] > 0.5).sum())
    return coarse_axes, coarse_rows, best, n_feas, spacing


def _split_args(args, workers: int):
    per_point = args[:5] + args[12:]   # arrays indexed by lattice point
    scalars = args[5:12]
    n = len(args[0])
    bounds = np.linspace(0, n, workers + 1).astype(int)
    out = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        if b > a:
            arrs = tuple(arr[a:b] for arr in per_point)
            out.append(arrs[:5] + scalars + arrs[5:])
    return out


def _arc_prefix(params: EpidemicParams, t1: float, hold_level: float,
                step: float) -> tuple[Trajectory, float]:
    """Free path to t1 then the holding arc until x reaches the herd
    level (or the horizon); returns the prefix path and the arc end."""
    free = _free_path(params, step)
    x1 = free.x_at(t1)
    t_end = min(t1 + (x1 - params.herd_level) / (params.gamma * hold_level),
                params.horizon)
    segs = []
    if t1 > 0.0:
        segs.append(ConstantSigma(params.sigma_f, 0.0, t1))
    segs.append(BoundaryArc(x1, t1, params.gamma, hold_level, t1, t_end))
    sched = ControlSchedule(tuple(segs), t_end)
    return integrate(params, sched, step), t_end


def grid_search(params: EpidemicParams, resolution: tuple[int, int] = (100, 100),
                refinements: int = 2, step: float = 0.05,
                workers: int = 1) -> SearchGrid:
    """Direct maximization of the final susceptible fraction.

    When the cap binds, the search runs over arc exits t2 in [entry, arc
    end] and durations mu in [0, tau]; otherwise over quarantine starts
    in [0, horizon].  Two zoom passes follow the coarse pass, so the
    final lattice spacing is 1e-4 of the initial spans.
    """
    t1 = cap_hitting_time(params, step=min(step, 0.01))
    if t1 is not None:
        prefix, t_end = _arc_prefix(params, t1, params.cap, step)
        t2_lo, t2_hi = t1, t_end
        mu_hi = min(params.tau, params.horizon - t1)
    else:
        prefix = _free_path(params, step)
        t2_lo, t2_hi = 0.0, params.horizon
        mu_hi = params.tau
    axes, rows, best, n_feas, spacing = _search(
        params, prefix, t2_lo, t2_hi, mu_hi, resolution, refinements, step, workers)
    return SearchGrid("fixed_at_entry", t1, axes[0], axes[1], rows, best,
                      n_feas, spacing)


def sweep_t1(params: EpidemicParams, resolution: int = 12,
             inner_resolution: tuple[int, int] = (40, 40),
             refinements: int = 1, step: float = 0.05,
             workers: int = 1) -> SweepProfile:
    """Objective profile over the arc entry time.

    For each entry t1 on a lattice in [0, first cap hit], hold y at its
    current level until the exit and run the inner (t2, mu) search.  The
    profile is expected to be maximal at the cap hit itself; entries
    beyond it are infeasible because y would cross the cap first.
    """
    free = _free_path(params, min(step, 0.01))
    from .dynamics import locate_on_trajectory
    t_hit = locate_on_trajectory(free, "y_hits_cap_rising", (0.0, params.horizon))
    if t_hit is None:
        raise ValueError("free path never reaches the cap; nothing to sweep")
    t1s = np.linspace(0.0, t_hit, resolution)
    vals = np.full(resolution, np.nan)
    best = None
    for i, t1 in enumerate(t1s):
        level = free.y_at(float(t1))
        prefix, t_end = _arc_prefix(params, float(t1), level, step)
        _, _, b, _, _ = _search(params, prefix, float(t1), t_end,
                                min(params.tau, params.horizon - float(t1)),
                                inner_resolution, refinements, step, workers)
        if b is not None:
            vals[i] = b[2]
            if best is None or b[2] > best[3]:
                best = (float(t1), b[0], b[1], b[2])
    return SweepProfile(t1s, vals, best)
