"""Closed-form final susceptible fraction and its partial derivatives.

Along any constant-sigma stretch the quantity x*exp(-sigma*(x+y)) is
conserved, which turns the t -> infinity limit of x into a fixed point
x_inf = rho * exp(sigma * x_inf).  Substituting w = -sigma * x_inf gives
w * e^w = -sigma * rho, i.e. w is the principal Lambert W branch
evaluated at -sigma*rho, and x_inf = -W0(-sigma*rho) / sigma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

_BRANCH_POINT = -math.exp(-1.0)   # -1/e, left edge of the W0 domain


def lambert_w0(z: float) -> float:
    """Principal branch of Lambert's W: the solution w >= -1 of w*e^w = z.

    Halley iteration from a piecewise initial guess (square-root series
    near the branch point, log-based for large arguments); converges to
    |dw| <= 1e-14 in a handful of steps.
    """
    if z < _BRANCH_POINT:
        if z > _BRANCH_POINT - 1e-12:   # FP dust below the branch point
            z = _BRANCH_POINT
        else:
            raise DomainError(f"lambert_w0 needs z >= -1/e, got {z}")
    if z == 0.0:
        return 0.0
    p2 = 2.0 * (math.e * z + 1.0)
    if p2 <= 0.0:
        return -1.0
    if p2 < 1e-8:
        # series in p = sqrt(2(e z + 1)) about the branch point; for p this
        # small the Halley denominator w+1 ~ p is too ill-conditioned to iterate
        p = math.sqrt(p2)
        return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)))
    if z < -0.25:
        p = math.sqrt(p2)
        w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)))
    elif z < 0.0:
        w = z * (1.0 - z)     # crude; Halley is cubic, two steps recover it
    elif z < 3.0:
        w = math.log1p(z)
    else:
        lz = math.log(z)
        w = lz - math.log(lz)
    for _ in range(50):
        ew = math.exp(w)
        f = w * ew - z
        w1 = w + 1.0
        dw = f / (ew * w1 - (w + 2.0) * f / (2.0 * w1))
        w -= dw
        if abs(dw) <= 1e-14:
            break
    return w


def sir_invariant(x: float, y: float, sigma: float) -> float:
    """Conserved quantity x * exp(-sigma*(x+y)) of constant-sigma dynamics."""
    return x * math.exp(-sigma * (x + y))


@dataclass(frozen=True)
class FinalSizeResult:
    x_inf: float      # limiting susceptible fraction
    w_value: float    # Lambert W output used (0 when sigma == 0)
    residual: float   # |x_inf - rho * exp(sigma * x_inf)| fixed-point defect


def final_susceptible(x: float, y: float, sigma: float) -> FinalSizeResult:
    """Limiting susceptible fraction from state (x, y) under constant sigma.

    sigma == 0 short-circuits to x (no further infections).  For y > 0 the
    result lies strictly inside (0, min(x, 1/sigma)).
    """
    if x <= 0.0 or y < 0.0 or x + y > 1.0 + 1e-9:
        raise DomainError(f"state ({x}, {y}) outside the admissible region")
    if sigma == 0.0:
        return FinalSizeResult(x, 0.0, 0.0)
    rho = sir_invariant(x, y, sigma)
    arg = -sigma * rho
    # -sigma*rho >= -1/e holds for every admissible state: sigma*x*e^{-sigma*x}
    # is at most 1/e and the e^{-sigma*y} factor only shrinks it
    assert arg >= _BRANCH_POINT - 1e-12, "Lambert argument left its provable range"
    w = lambert_w0(arg)
    x_inf = -w / sigma
    residual = abs(x_inf - rho * math.exp(sigma * x_inf))
    return FinalSizeResult(x_inf, w, residual)


def final_susceptible_dx(x: float, y: float, sigma: float) -> float:
    """d x_inf / dx in closed form: (1-sigma*x)/x * x_inf/(1-sigma*x_inf)."""
    x_inf = final_susceptible(x, y, sigma).x_inf
    return (1.0 - sigma * x) / x * x_inf / (1.0 - sigma * x_inf)


def final_susceptible_dy(x: float, y: float, sigma: float) -> float:
    """d x_inf / dy in closed form: -sigma*x_inf/(1-sigma*x_inf), always < 0."""
    x_inf = final_susceptible(x, y, sigma).x_inf
    return -sigma * x_inf / (1.0 - sigma * x_inf)
