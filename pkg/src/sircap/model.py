"""Problem instances and piecewise control schedules.

The state is the normalized SIR pair (x, y) = (susceptible, infected)
plus the accumulated control v(t) = integral of sigma.  The control
sigma(t) is the time-dependent reproduction number, adjustable between
sigma_s (strict quarantine) and sigma_f (no restrictions) during the
intervention window [0, horizon].
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ArcOverrun, DomainError, InvalidParams, ScheduleError


@dataclass(frozen=True)
class EpidemicParams:
    """One problem instance.

    gamma    recovery rate (1/time)
    sigma_s  strict-quarantine reproduction number, < 1
    sigma_f  unrestricted reproduction number, > sigma_s
    horizon  end of the intervention window T
    tau      maximum cumulative strict-quarantine time allowed by the budget
    cap      maximum allowed infected fraction (hospital capacity)
    x0, y0   initial susceptible / infected fractions
    """

    gamma: float
    sigma_s: float
    sigma_f: float
    horizon: float
    tau: float
    cap: float
    x0: float
    y0: float
    # y0 == 0 is rejected in production use; tests of the no-infection
    # degenerate path may opt in explicitly.
    allow_degenerate: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not (0.0 <= self.sigma_s < self.sigma_f):
            raise InvalidParams("need 0 <= sigma_s < sigma_f")
        if not self.sigma_s < 1.0:
            raise InvalidParams("strict-quarantine reproduction number must be < 1")
        if not self.gamma > 0.0:
            raise InvalidParams("gamma must be positive")
        if not (0.0 <= self.tau < self.horizon):
            raise InvalidParams("need 0 <= tau < horizon")
        if not self.cap > 0.0:
            raise InvalidParams("cap must be positive")
        if not self.x0 > 0.0:
            raise InvalidParams("x0 must be positive")
        if self.y0 < 0.0 or (self.y0 == 0.0 and not self.allow_degenerate):
            raise InvalidParams("y0 must be positive")
        if self.x0 + self.y0 > 1.0:
            raise InvalidParams("x0 + y0 must not exceed 1")
        if not self.y0 < self.cap:
            raise InvalidParams("initial infected fraction already exceeds the cap")

    @property
    def herd_level(self) -> float:
        """Susceptible fraction 1/sigma_f below which y declines for any
        admissible control."""
        return 1.0 / self.sigma_f

    def budget_floor(self) -> float:
        """Minimum admissible v(horizon): sigma_s*tau + sigma_f*(horizon-tau)."""
        return self.sigma_s * self.tau + self.sigma_f * (self.horizon - self.tau)


@dataclass(frozen=True)
class ConstantSigma:
    """Segment with a fixed reproduction number on [t_start, t_end]."""

    value: float
    t_start: float
    t_end: float

    def sigma_at(self, t: float) -> float:
        return self.value


@dataclass(frozen=True)
class BoundaryArc:
    """Segment holding the infected fraction constant at ``hold_level``.

    The control is 1/x(t) with x falling linearly at rate gamma*hold_level,
    so sigma(t) = 1 / (x_entry - gamma*hold_level*(t - t_entry)).  For the
    cap-riding arcs of solved policies hold_level equals the cap.
    """

    x_entry: float
    t_entry: float
    gamma: float
    hold_level: float
    t_start: float
    t_end: float

    def x_at(self, t: float) -> float:
        return boundary_x(self.x_entry, self.t_entry, t, self.gamma, self.hold_level)

    def sigma_at(self, t: float) -> float:
        return 1.0 / self.x_at(t)


Segment = ConstantSigma | BoundaryArc


def boundary_x(x_entry: float, t_entry: float, t: float,
               gamma: float, hold_level: float) -> float:
    """Susceptible fraction along a holding arc: x_entry - gamma*level*(t-t_entry).

    Raises ArcOverrun if the arc was extended until x would be nonpositive.
    """
    if t < t_entry:
        raise DomainError(f"t={t} precedes arc entry time {t_entry}")
    x = x_entry - gamma * hold_level * (t - t_entry)
    if x <= 0.0:
        raise ArcOverrun(f"holding arc exhausted the susceptible pool at t={t}")
    return x


@dataclass(frozen=True)
class ControlSchedule:
    """Ordered segments covering [0, horizon] with no gaps or overlaps.

    Controls are right-continuous: at a junction the value of the later
    segment applies.
    """

    segments: tuple[Segment, ...]
    horizon: float

    def __post_init__(self) -> None:
        if not self.segments:
            raise ScheduleError("empty schedule")
        t = 0.0
        for seg in self.segments:
            if abs(seg.t_start - t) > 1e-9:
                raise ScheduleError(f"gap or overlap at t={seg.t_start} (expected {t})")
            if seg.t_end < seg.t_start:
                raise ScheduleError("segment ends before it starts")
            t = seg.t_end
        if abs(t - self.horizon) > 1e-9:
            raise ScheduleError(f"schedule covers [0, {t}], expected [0, {self.horizon}]")

    def segment_at(self, t: float) -> Segment:
        if t < 0.0 or t > self.horizon:
            raise DomainError(f"t={t} outside [0, {self.horizon}]")
        for seg in self.segments:
            if t < seg.t_end:
                return seg
        return self.segments[-1]

    def sigma_at(self, t: float) -> float:
        """Control value at time t (right-continuous at junctions)."""
        return self.segment_at(t).sigma_at(t)

    def check_admissible(self, params: EpidemicParams, tol: float = 1e-9) -> None:
        """Verify sigma stays within [sigma_s, sigma_f] on every segment."""
        for seg in self.segments:
            if isinstance(seg, ConstantSigma):
                lo = hi = seg.value
            else:
                # sigma_b increases along the arc, so the endpoints bound it
                lo = seg.sigma_at(seg.t_start)
                hi = seg.sigma_at(seg.t_end)
            if lo < params.sigma_s - tol or hi > params.sigma_f + tol:
                raise ScheduleError(
                    f"control leaves [{params.sigma_s}, {params.sigma_f}] "
                    f"on segment [{seg.t_start}, {seg.t_end}]")

    # -- constructors for the policy shapes used throughout ----------------

    @staticmethod
    def constant(value: float, horizon: float) -> "ControlSchedule":
        return ControlSchedule((ConstantSigma(value, 0.0, horizon),), horizon)

    @staticmethod
    def three_phase(params: EpidemicParams, t_start: float, duration: float) -> "ControlSchedule":
        """Free / strict / free: quarantine of given duration starting at t_start."""
        T = params.horizon
        t_end = t_start + duration
        if not (0.0 <= t_start <= t_end <= T + 1e-12):
            raise ScheduleError("quarantine window outside [0, horizon]")
        t_end = min(t_end, T)
        segs: list[Segment] = []
        if t_start > 0.0:
            segs.append(ConstantSigma(params.sigma_f, 0.0, t_start))
        if t_end > t_start:
            segs.append(ConstantSigma(params.sigma_s, t_start, t_end))
        if t_end < T:
            segs.append(ConstantSigma(params.sigma_f, t_end, T))
        return ControlSchedule(tuple(segs), T)

    @staticmethod
    def four_phase(params: EpidemicParams, t1: float, t2: float, duration: float,
                   x_entry: float, hold_level: float | None = None) -> "ControlSchedule":
        """Free / hold-arc / strict / free: the constrained policy shape."""
        T = params.horizon
        level = params.cap if hold_level is None else hold_level
        t3 = t2 + duration
        if not (0.0 <= t1 <= t2 <= t3 <= T + 1e-12):
            raise ScheduleError("policy times out of order")
        t3 = min(t3, T)
        segs: list[Segment] = []
        if t1 > 0.0:
            segs.append(ConstantSigma(params.sigma_f, 0.0, t1))
        if t2 > t1:
            segs.append(BoundaryArc(x_entry, t1, params.gamma, level, t1, t2))
        if t3 > t2:
            segs.append(ConstantSigma(params.sigma_s, t2, t3))
        if t3 < T:
            segs.append(ConstantSigma(params.sigma_f, t3, T))
        return ControlSchedule(tuple(segs), T)


def evaluate_control(schedule: ControlSchedule, t: float) -> float:
    """Control value at time t; errors if t is outside [0, horizon]."""
    return schedule.sigma_at(t)
