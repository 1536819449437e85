"""Costate reconstruction for solved policies.

Backward RK4 of the adjoint pair (lambda1, lambda2) along the stored
forward path, terminal conditions from the closed-form partials of the
final susceptible fraction.  On cap-riding arcs the cap multiplier
eta = -gamma*lambda1 replaces zero in the lambda2 equation, which makes
lambda2 exactly constant there.  The switching function

    phi(t) = beta + gamma*x*y*(lambda2 - lambda1)

must then be positive before the arc, zero on it, negative during the
strict quarantine and nonnegative after it; the budget multiplier beta
is recovered from the arc (where phi vanishes identically) or from
complementarity when there is no arc.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .constrained import ConstrainedPolicy
from .dynamics import Trajectory, integrate
from .finalsize import final_susceptible
from .model import BoundaryArc, EpidemicParams

__all__ = ["AdjointPath", "PmpCondition", "PmpReport", "terminal_costate",
           "integrate_adjoint", "check_switching_structure"]

BUDGET_SLACK_TOL = 1e-6


@dataclass
class AdjointPath:
    """Backward costate samples on the forward mesh.

    ``beta`` is the (constant) budget multiplier estimate; ``jump_nu``
    records the largest lambda2 jump applied at junctions, which is zero
    here because the continuous back-integration never needs one (the
    solved policies keep junction states above the herd level, where the
    costates are continuous).
    """

    t: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray
    phi: np.ndarray
    eta: np.ndarray
    hamiltonian: np.ndarray
    beta: float
    lambda0: float = 1.0
    jump_nu: float = 0.0
    on_arc: np.ndarray = field(default=None, repr=False)


def terminal_costate(params: EpidemicParams, x_T: float, y_T: float) -> tuple[float, float]:
    """Costate end conditions from the closed-form final-size partials."""
    x_inf = final_susceptible(x_T, y_T, params.sigma_f).x_inf
    denom = 1.0 - params.sigma_f * x_inf
    lam1 = (1.0 - params.sigma_f * x_T) / x_T * x_inf / denom
    lam2 = -params.sigma_f * x_inf / denom
    return lam1, lam2


def integrate_adjoint(policy: ConstrainedPolicy, params: EpidemicParams,
                      step: float = 0.01) -> AdjointPath:
    """Backward costate path along the policy's forward trajectory."""
    traj = integrate(params, policy.schedule, step)
    t, x, y = traj.t, traj.x, traj.y
    n = len(t)
    g = params.gamma
    # per-interval quantities: endpoint and midpoint states and controls
    h = np.diff(t)
    s0, s1 = traj._d0["v"], traj._d1["v"]      # sigma at interval endpoints
    xm = _midpoints(traj, "x")
    ym = _midpoints(traj, "y")
    sm = _mid_sigmas(traj)
    arc_iv = np.zeros(n - 1, dtype=bool)
    for seg in policy.schedule.segments:
        if isinstance(seg, BoundaryArc):
            arc_iv |= (t[:-1] >= seg.t_start - 1e-12) & (t[1:] <= seg.t_end + 1e-12)

    lam1 = np.empty(n)
    lam2 = np.empty(n)
    lam1[-1], lam2[-1] = terminal_costate(params, float(x[-1]), float(y[-1]))

    def rhs(l1, l2, xx, yy, ss, on_arc):
        eta = -g * l1 if on_arc else 0.0
        d = (l1 - l2) * g * ss
        return d * yy, d * xx + g * l2 + eta

    for i in range(n - 2, -1, -1):
        hi = float(h[i])
        on_arc = bool(arc_iv[i])
        l1, l2 = float(lam1[i + 1]), float(lam2[i + 1])
        k11, k12 = rhs(l1, l2, x[i + 1], y[i + 1], s1[i], on_arc)
        a1, a2 = l1 - 0.5 * hi * k11, l2 - 0.5 * hi * k12
        k21, k22 = rhs(a1, a2, xm[i], ym[i], sm[i], on_arc)
        b1, b2 = l1 - 0.5 * hi * k21, l2 - 0.5 * hi * k22
        k31, k32 = rhs(b1, b2, xm[i], ym[i], sm[i], on_arc)
        c1, c2 = l1 - hi * k31, l2 - hi * k32
        k41, k42 = rhs(c1, c2, x[i], y[i], s0[i], on_arc)
        lam1[i] = l1 - (hi / 6.0) * (k11 + 2.0 * (k21 + k31) + k41)
        lam2[i] = l2 - (hi / 6.0) * (k12 + 2.0 * (k22 + k32) + k42)

    node_arc = np.zeros(n, dtype=bool)
    node_arc[:-1] |= arc_iv
    node_arc[1:] |= arc_iv
    eta = np.where(node_arc, -g * lam1, 0.0)
    beta = _estimate_beta(policy, traj, t, x, y, lam1, lam2, node_arc, g)
    phi = beta + g * x * y * (lam2 - lam1)
    sigma_nodes = np.append(s0, s1[-1])
    hamiltonian = phi * sigma_nodes - g * lam2 * y
    return AdjointPath(t, lam1, lam2, phi, eta, hamiltonian, beta,
                       on_arc=node_arc)


def _midpoints(traj: Trajectory, comp: str) -> np.ndarray:
    arr = getattr(traj, comp)
    h = np.diff(traj.t)
    d0, d1 = traj._d0[comp], traj._d1[comp]
    # cubic Hermite at s = 1/2
    return 0.5 * (arr[:-1] + arr[1:]) + 0.125 * h * (d0 - d1)


def _mid_sigmas(traj: Trajectory) -> np.ndarray:
    tm = 0.5 * (traj.t[:-1] + traj.t[1:])
    out = np.empty(len(tm))
    for seg in traj.schedule.segments:
        mask = (tm >= seg.t_start) & (tm <= seg.t_end)
        if not mask.any():
            continue
        if isinstance(seg, BoundaryArc):
            out[mask] = 1.0 / (seg.x_entry - seg.gamma * seg.hold_level
                               * (tm[mask] - seg.t_entry))
        else:
            out[mask] = seg.value
    return out


def _estimate_beta(policy, traj, t, x, y, lam1, lam2, node_arc, g) -> float:
    """Recover the budget multiplier.

    Complementarity pins it to zero whenever the budget is slack.  On a
    tight budget with an arc, phi vanishes there, so beta equals
    gamma*x*y*(lambda1-lambda2) along it (constant up to integration
    error; averaged).  Tight without an arc: the value that zeroes phi at
    the quarantine start."""
    if traj.budget_slack() > BUDGET_SLACK_TOL:
        return 0.0
    if node_arc.any():
        cand = g * x[node_arc] * y[node_arc] * (lam1[node_arc] - lam2[node_arc])
        return max(0.0, float(np.mean(cand)))
    j = int(np.searchsorted(t, policy.t2))
    j = min(max(j, 0), len(t) - 1)
    return max(0.0, float(g * x[j] * y[j] * (lam1[j] - lam2[j])))


@dataclass(frozen=True)
class PmpCondition:
    name: str
    passed: bool
    worst: float
    tolerance: float
    first_violation: Optional[float] = None
    note: str = ""

    def as_dict(self) -> dict:
        d = {"name": self.name, "passed": self.passed, "worst": self.worst,
             "tolerance": self.tolerance}
        if self.first_violation is not None:
            d["first_violation_time"] = self.first_violation
        if self.note:
            d["note"] = self.note
        return d


@dataclass(frozen=True)
class PmpReport:
    verified: bool
    scale: float
    beta: float
    conditions: tuple[PmpCondition, ...]

    def as_dict(self) -> dict:
        return {"verified": self.verified, "scale": self.scale, "beta": self.beta,
                "conditions": [c.as_dict() for c in self.conditions]}


def _band(name, t, values, mask, lower, upper, tol, note="") -> PmpCondition:
    """Check lower-tol <= values <= upper+tol on the masked nodes."""
    if not mask.any():
        return PmpCondition(name, True, 0.0, tol, note=note or "no nodes in phase")
    vals = values[mask]
    lo_viol = (lower - vals) if lower is not None else np.zeros_like(vals)
    hi_viol = (vals - upper) if upper is not None else np.zeros_like(vals)
    viol = np.maximum(lo_viol, hi_viol)
    j = int(np.argmax(viol))
    worst = float(viol[j])
    passed = worst <= tol
    first = None
    if not passed:
        bad = np.nonzero(viol > tol)[0]
        first = float(t[mask][bad[0]])
    return PmpCondition(name, passed, worst, tol, first, note)


def check_switching_structure(adjoint: AdjointPath, policy: ConstrainedPolicy,
                              phi_rel_tol: float = 1e-5,
                              lambda2_tol: float = 1e-5,
                              eta_tol: float = 1e-8,
                              hamiltonian_rel_tol: float = 1e-4) -> PmpReport:
    """Verify the sign pattern of the switching function and the arc
    conditions; a failed condition downgrades the policy to unverified
    rather than raising."""
    t, phi = adjoint.t, adjoint.phi
    T = float(t[-1])
    t1, t2, t3 = policy.t1, policy.t2, policy.t2 + policy.mu
    scale = float(np.abs(phi).max())
    tol = phi_rel_tol * scale
    has_arc = bool(adjoint.on_arc is not None and adjoint.on_arc.any())
    eps = 1e-9

    conds = [
        _band("phi positive before quarantine", t, phi,
              (t > eps) & (t < t1 - eps), 0.0, None, tol),
        _band("phi vanishes on the cap arc", t, phi,
              (t >= t1 - eps) & (t <= t2 + eps) & (np.full(len(t), has_arc)),
              0.0, 0.0, tol, note="" if has_arc else "no boundary arc"),
        _band("phi negative during quarantine", t, phi,
              (t > t2 + eps) & (t < t3 - eps), None, 0.0, tol),
        _band("phi nonnegative after quarantine", t, phi,
              (t > t3 + eps) & (t <= T), 0.0, None, tol,
              note="" if t3 < T - 1e-6 else "quarantine runs to the horizon"),
    ]
    if has_arc:
        arc = adjoint.on_arc
        lam2 = adjoint.lambda2
        ref = float(lam2[np.nonzero(arc)[0][-1]])
        conds.append(_band("lambda2 constant on the arc", t, np.abs(lam2 - ref),
                           arc, None, 0.0, lambda2_tol))
        conds.append(_band("cap multiplier nonnegative on the arc", t,
                           adjoint.eta, arc, 0.0, None, eta_tol))
    else:
        conds.append(PmpCondition("lambda2 constant on the arc", True, 0.0,
                                  lambda2_tol, note="no boundary arc"))
        conds.append(PmpCondition("cap multiplier nonnegative on the arc", True,
                                  0.0, eta_tol, note="no boundary arc"))

    H = adjoint.hamiltonian
    h_scale = float(np.abs(H).max())
    h_dev = float(H.max() - H.min())
    conds.append(PmpCondition("hamiltonian constant", h_dev <= hamiltonian_rel_tol * h_scale,
                              h_dev, hamiltonian_rel_tol * h_scale))
    conds.append(PmpCondition("junction jumps nonnegative", adjoint.jump_nu >= -eta_tol,
                              float(adjoint.jump_nu), eta_tol,
                              note="continuous back-integration; no jumps applied"))
    # complementarity: a slack budget must not carry a positive multiplier
    slack_ok = True
    note = "budget tight"
    worst = 0.0
    if policy.budget_slack > BUDGET_SLACK_TOL:
        worst = adjoint.beta
        slack_ok = adjoint.beta <= 1e-12
        note = "budget slack; beta must vanish"
    conds.append(PmpCondition("budget multiplier complementarity", slack_ok,
                              worst, 0.0, note=note))
    verified = all(c.passed for c in conds)
    return PmpReport(verified, scale, adjoint.beta, tuple(conds))
