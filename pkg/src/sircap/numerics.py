"""Small numerical utilities: root bracketing/bisection, Simpson weights,
mesh construction and cubic Hermite evaluation."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import BracketError


def bisect(f: Callable[[float], float], a: float, b: float, tol: float = 1e-6,
           fa: float | None = None, fb: float | None = None) -> float:
    """Root of f on [a, b] by plain bisection to |b-a| <= tol.

    Endpoint values may be passed in to save two evaluations.  An exact
    zero at an endpoint is returned immediately; otherwise f(a) and f(b)
    must differ in sign.
    """
    if fa is None:
        fa = f(a)
    if fa == 0.0:
        return a
    if fb is None:
        fb = f(b)
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise BracketError(f"no sign change on [{a}, {b}]: f(a)={fa}, f(b)={fb}")
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:      # interval below float resolution
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm > 0.0) == (fa > 0.0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return 0.5 * (a + b)


def scan_bracket(f: Callable[[float], float], a: float, b: float,
                 n: int = 200) -> tuple[float, float, float, float] | None:
    """First sign-change bracket of f on [a, b] from an n-point scan.

    Returns (lo, hi, f_lo, f_hi) or None when every sample has one sign.
    """
    ts = np.linspace(a, b, n + 1)
    prev_t, prev_v = ts[0], f(float(ts[0]))
    if prev_v == 0.0:
        return prev_t, prev_t, 0.0, 0.0
    for t in ts[1:]:
        v = f(float(t))
        if v == 0.0 or (v > 0.0) != (prev_v > 0.0):
            return float(prev_t), float(t), prev_v, v
        prev_t, prev_v = t, v
    return None


def uniform_mesh(length: float, step: float, even: bool = False) -> tuple[int, float]:
    """Number of sub-intervals and actual step for a uniform mesh of the
    given length with spacing as close to ``step`` as possible (never
    larger).  ``even=True`` forces an even count, as composite Simpson
    needs."""
    if length <= 0.0:
        return 0, 0.0
    n = max(1, math.ceil(length / step - 1e-9))
    if even:
        n = max(2, 2 * math.ceil(n / 2))
    return n, length / n


def simpson_uniform(values: np.ndarray, h: float) -> float:
    """Composite Simpson on a uniform mesh; len(values) must be odd."""
    n = len(values) - 1
    if n == 0:
        return 0.0
    if n % 2:
        raise ValueError("composite Simpson needs an even interval count")
    acc = values[0] + values[n] + 4.0 * values[1:n:2].sum() + 2.0 * values[2:n:2].sum()
    return float(acc * h / 3.0)


def hermite_eval(s: float, h: float, y0: float, y1: float,
                 d0: float, d1: float) -> float:
    """Cubic Hermite value at normalized position s in [0, 1] of an
    interval of width h with endpoint values y0, y1 and slopes d0, d1."""
    s2 = s * s
    s3 = s2 * s
    return (y0 * (2.0 * s3 - 3.0 * s2 + 1.0)
            + d0 * h * (s3 - 2.0 * s2 + s)
            + y1 * (-2.0 * s3 + 3.0 * s2)
            + d1 * h * (s3 - s2))


def central_difference(f: Callable[[float], float], point: float, h: float) -> float:
    """Two-sided finite-difference estimate of f'(point)."""
    return (f(point + h) - f(point - h)) / (2.0 * h)
