"""Forward integration of the controlled SIR system and event location.

Fixed-step classical RK4 with segment junctions forced onto the mesh;
dense output between mesh nodes is cubic Hermite.  Event times (cap
crossings, herd-immunity crossing, infection peak) are localized by
bisection on the dense output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _backend as kernels
from .errors import DomainError, NumericalFailure
from .model import BoundaryArc, ConstantSigma, ControlSchedule, EpidemicParams, boundary_x
from .numerics import bisect, hermite_eval, uniform_mesh

__all__ = ["Event", "Trajectory", "integrate", "locate_event", "boundary_x"]

STATE_TOL = 1e-9      # allowed excursion of x, y outside [0, 1]
CLIP_TOL = 1e-12      # negative values above -CLIP_TOL are clamped to 0
EVENT_TOL = 1e-6      # default |dt| tolerance for event bisection


@dataclass(frozen=True)
class Event:
    kind: str
    time: float


@dataclass
class Trajectory:
    """Sampled (t, x, y, v, sigma) path with labeled events.

    ``sigma`` holds the right-continuous control at each node.  The
    private interval arrays carry endpoint slopes per interval, computed
    with the sigma of the segment owning that interval, so interpolation
    is exact-order even across control jumps.
    """

    params: EpidemicParams
    schedule: ControlSchedule
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    v: np.ndarray
    sigma: np.ndarray
    events: list[Event] = field(default_factory=list)
    _d0: dict = field(default_factory=dict, repr=False)
    _d1: dict = field(default_factory=dict, repr=False)

    # -- dense output -------------------------------------------------------

    def _interval(self, t: float) -> tuple[int, float, float]:
        T = self.t[-1]
        if t < -STATE_TOL or t > T + STATE_TOL:
            raise DomainError(f"t={t} outside [0, {T}]")
        t = min(max(t, 0.0), T)
        i = int(np.searchsorted(self.t, t, side="right")) - 1
        i = min(max(i, 0), len(self.t) - 2)
        h = self.t[i + 1] - self.t[i]
        s = (t - self.t[i]) / h if h > 0.0 else 0.0
        return i, h, s

    def _eval(self, comp: str, t: float) -> float:
        arr = getattr(self, comp)
        i, h, s = self._interval(t)
        return float(hermite_eval(s, h, arr[i], arr[i + 1],
                                  self._d0[comp][i], self._d1[comp][i]))

    def x_at(self, t: float) -> float:
        return self._eval("x", t)

    def y_at(self, t: float) -> float:
        return self._eval("y", t)

    def v_at(self, t: float) -> float:
        return self._eval("v", t)

    def state_at(self, t: float) -> tuple[float, float, float]:
        return self.x_at(t), self.y_at(t), self.v_at(t)

    def sigma_at(self, t: float) -> float:
        return self.schedule.sigma_at(t)

    # -- summary quantities --------------------------------------------------

    def max_y(self, refine_tol: float = EVENT_TOL) -> tuple[float, float]:
        """Time and value of the global maximum of y, refined on the dense
        output when the peak is interior to a segment."""
        j = int(np.argmax(self.y))
        t_peak = float(self.t[j])
        seg = self.schedule.segment_at(min(t_peak, self.schedule.horizon))
        lo = max(seg.t_start, float(self.t[max(j - 1, 0)]))
        hi = min(seg.t_end, float(self.t[min(j + 1, len(self.t) - 1)]))
        if hi - lo > refine_tol:
            # y' has the sign of sigma*x - 1; refine only across a sign change
            g = lambda t: self.schedule.sigma_at(t) * self.x_at(t) - 1.0
            glo, ghi = g(lo), g(hi)
            if glo > 0.0 > ghi:
                t_peak = bisect(g, lo, hi, refine_tol, fa=glo, fb=ghi)
        return t_peak, float(self.y_at(t_peak))

    def budget_value(self) -> float:
        """Total control integral v(horizon)."""
        return float(self.v[-1])

    def budget_slack(self) -> float:
        """v(horizon) minus the admissibility floor; admissible iff >= 0."""
        return self.budget_value() - self.params.budget_floor()


def _segment_sigmas(seg, ts: np.ndarray) -> np.ndarray:
    if isinstance(seg, ConstantSigma):
        return np.full(len(ts), seg.value)
    return 1.0 / (seg.x_entry - seg.gamma * seg.hold_level * (ts - seg.t_entry))


def integrate(params: EpidemicParams, schedule: ControlSchedule,
              step: float = 0.01, event_tol: float = EVENT_TOL) -> Trajectory:
    """RK4 path of (x, y, v) over [0, horizon] under the given schedule.

    Raises NumericalFailure if x or y leave [0, 1] by more than 1e-9.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    t_parts = [np.array([0.0])]
    x_parts = [np.array([params.x0])]
    y_parts = [np.array([params.y0])]
    v_parts = [np.array([0.0])]
    spans: list[tuple[int, int, object]] = []   # node index span per segment
    x, y, v = params.x0, params.y0, 0.0
    count = 1
    for seg in schedule.segments:
        length = seg.t_end - seg.t_start
        n, h = uniform_mesh(length, step)
        if n == 0:
            spans.append((count - 1, count - 1, seg))
            continue
        if isinstance(seg, ConstantSigma):
            xs, ys, vs = kernels.rk4_const(x, y, v, seg.value, params.gamma, h, n)
        else:
            rel0 = seg.t_start - seg.t_entry
            xs, ys, vs = kernels.rk4_arc(x, y, v, seg.x_entry,
                                         seg.gamma * seg.hold_level, rel0,
                                         params.gamma, h, n)
        ts = seg.t_start + h * np.arange(n + 1)
        ts[-1] = seg.t_end
        t_parts.append(ts[1:])
        x_parts.append(xs[1:])
        y_parts.append(ys[1:])
        v_parts.append(vs[1:])
        spans.append((count - 1, count - 1 + n, seg))
        x, y, v = float(xs[-1]), float(ys[-1]), float(vs[-1])
        count += n

    t = np.concatenate(t_parts)
    xa = np.concatenate(x_parts)
    ya = np.concatenate(y_parts)
    va = np.concatenate(v_parts)

    # float guard: clamp tiny negatives, then enforce the trust region
    for arr in (xa, ya):
        np.clip(arr, 0.0, None, out=arr, where=(arr > -CLIP_TOL))
    bad = (xa < -STATE_TOL) | (xa > 1.0 + STATE_TOL) | (ya < -STATE_TOL) | (ya > 1.0 + STATE_TOL)
    if bad.any():
        j = int(np.argmax(bad))
        raise NumericalFailure(
            f"state left [0,1] at t={t[j]:.6f}: x={xa[j]:.3e}, y={ya[j]:.3e}")

    # per-interval endpoint slopes and right-continuous sigma samples
    g = params.gamma
    n_nodes = len(t)
    sigma = np.empty(n_nodes)
    d0 = {"x": np.empty(n_nodes - 1), "y": np.empty(n_nodes - 1), "v": np.empty(n_nodes - 1)}
    d1 = {"x": np.empty(n_nodes - 1), "y": np.empty(n_nodes - 1), "v": np.empty(n_nodes - 1)}
    for i0, i1, seg in spans:
        if i1 == i0:
            continue
        sg = _segment_sigmas(seg, t[i0:i1 + 1])
        xs, ys = xa[i0:i1 + 1], ya[i0:i1 + 1]
        dx = -g * sg * xs * ys
        dy = g * ys * (sg * xs - 1.0)
        for comp, d in (("x", dx), ("y", dy), ("v", sg)):
            d0[comp][i0:i1] = d[:-1]
            d1[comp][i0:i1] = d[1:]
        sigma[i0:i1] = sg[:-1]
    sigma[-1] = _segment_sigmas(schedule.segments[-1], t[-1:])[0]

    traj = Trajectory(params, schedule, t, xa, ya, va, sigma, [], d0, d1)
    traj.events = _annotate_events(traj, event_tol)
    return traj


def _crossing_time(traj: Trajectory, comp: str, level: float, i: int,
                   tol: float) -> float:
    f = lambda tt: traj._eval(comp, tt) - level
    a, b = float(traj.t[i]), float(traj.t[i + 1])
    return bisect(f, a, b, tol, fa=traj._eval(comp, a) - level,
                  fb=traj._eval(comp, b) - level)


def _annotate_events(traj: Trajectory, tol: float) -> list[Event]:
    events: list[Event] = []
    cap = traj.params.cap
    y = traj.y
    # cap crossings; the 1e-9 margin ignores chatter while riding the cap
    up = np.nonzero((y[:-1] < cap - 1e-9) & (y[1:] >= cap))[0]
    down = np.nonzero((y[:-1] >= cap) & (y[1:] < cap - 1e-9))[0]
    for i in up:
        events.append(Event("cap-hit", _crossing_time(traj, "y", cap, int(i), tol)))
    for i in down:
        events.append(Event("cap-exit", _crossing_time(traj, "y", cap, int(i), tol)))
    level = traj.params.herd_level
    x = traj.x
    herd = np.nonzero((x[:-1] >= level) & (x[1:] < level))[0]
    for i in herd[:1]:
        events.append(Event("herd-cross", _crossing_time(traj, "x", level, int(i), tol)))
    t_peak, _ = traj.max_y(tol)
    events.append(Event("y-peak", t_peak))
    events.sort(key=lambda e: e.time)
    return events


def locate_event(params: EpidemicParams, schedule: ControlSchedule, event_kind: str,
                 bracket: tuple[float, float], level: float | None = None,
                 step: float = 0.01, tol: float = EVENT_TOL) -> float | None:
    """Localize a state event inside ``bracket`` to |dt| <= tol.

    Kinds: ``y_hits_cap_rising`` (first upward crossing of the cap),
    ``x_crosses`` (x falling through ``level``), ``y_peak`` (interior
    maximum of y).  Returns None when the event does not occur in the
    bracket.
    """
    traj = integrate(params, schedule, step)
    return locate_on_trajectory(traj, event_kind, bracket, level=level, tol=tol)


def locate_on_trajectory(traj: Trajectory, event_kind: str, bracket: tuple[float, float],
                         level: float | None = None, tol: float = EVENT_TOL) -> float | None:
    lo, hi = bracket
    if lo < 0.0 or hi > traj.t[-1] + STATE_TOL or lo > hi:
        raise DomainError(f"bracket {bracket} outside [0, {traj.t[-1]}]")
    mask = (traj.t >= lo - STATE_TOL) & (traj.t <= hi + STATE_TOL)
    idx = np.nonzero(mask)[0]
    if len(idx) < 2:
        return None
    a, b = int(idx[0]), int(idx[-1])
    if event_kind == "y_hits_cap_rising":
        cap = traj.params.cap
        y = traj.y
        rows = np.nonzero((y[a:b] < cap - 1e-9) & (y[a + 1:b + 1] >= cap))[0]
        if len(rows) == 0:
            return None
        return _crossing_time(traj, "y", cap, a + int(rows[0]), tol)
    if event_kind == "x_crosses":
        if level is None:
            raise ValueError("x_crosses needs a level")
        x = traj.x
        rows = np.nonzero((x[a:b] >= level) & (x[a + 1:b + 1] < level))[0]
        if len(rows) == 0:
            return None
        return _crossing_time(traj, "x", level, a + int(rows[0]), tol)
    if event_kind == "y_peak":
        j = a + int(np.argmax(traj.y[a:b + 1]))
        if j in (a, b):
            return None   # no interior peak in bracket
        g = lambda tt: traj.schedule.sigma_at(tt) * traj.x_at(tt) - 1.0
        glo, ghi = g(float(traj.t[j - 1])), g(float(traj.t[j + 1]))
        if not (glo > 0.0 > ghi):
            return float(traj.t[j])
        return bisect(g, float(traj.t[j - 1]), float(traj.t[j + 1]), tol, fa=glo, fb=ghi)
    raise ValueError(f"unknown event kind: {event_kind}")
