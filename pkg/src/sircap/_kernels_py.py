"""Pure-Python integrator kernels.

These are the fallback for the compiled extension in ``_kernels.pyx``.
The arithmetic is written expression-for-expression identically in both
backends (and the extension is compiled without FP contraction), so the
two produce bit-identical trajectories.  Fixed-step classical RK4
throughout; the controlled SIR right-hand side is

    x' = -gamma * sigma * x * y
    y' =  gamma * y * (sigma * x - 1)
    v' =  sigma
"""

from __future__ import annotations

import numpy as np


def rk4_const(x: float, y: float, v: float, sigma: float, gamma: float,
              h: float, n: int):
    """n RK4 steps of size h under constant sigma; returns the full path
    as three float64 arrays of length n+1."""
    xs = np.empty(n + 1)
    ys = np.empty(n + 1)
    vs = np.empty(n + 1)
    xs[0] = x
    ys[0] = y
    vs[0] = v
    g = gamma
    s = sigma
    for i in range(n):
        k1x = -g * s * x * y
        k1y = g * y * (s * x - 1.0)
        ax = x + 0.5 * h * k1x
        ay = y + 0.5 * h * k1y
        k2x = -g * s * ax * ay
        k2y = g * ay * (s * ax - 1.0)
        bx = x + 0.5 * h * k2x
        by = y + 0.5 * h * k2y
        k3x = -g * s * bx * by
        k3y = g * by * (s * bx - 1.0)
        cx = x + h * k3x
        cy = y + h * k3y
        k4x = -g * s * cx * cy
        k4y = g * cy * (s * cx - 1.0)
        x = x + (h / 6.0) * (k1x + 2.0 * (k2x + k3x) + k4x)
        y = y + (h / 6.0) * (k1y + 2.0 * (k2y + k3y) + k4y)
        v = v + h * s
        xs[i + 1] = x
        ys[i + 1] = y
        vs[i + 1] = v
    return xs, ys, vs


def rk4_arc(x: float, y: float, v: float, x_entry: float, slope: float,
            rel0: float, gamma: float, h: float, n: int):
    """n RK4 steps under the holding control sigma(r) = 1/(x_entry - slope*r),
    where r is time since arc entry; the first step starts at r = rel0."""
    xs = np.empty(n + 1)
    ys = np.empty(n + 1)
    vs = np.empty(n + 1)
    xs[0] = x
    ys[0] = y
    vs[0] = v
    g = gamma
    for i in range(n):
        r = rel0 + i * h
        s1 = 1.0 / (x_entry - slope * r)
        s2 = 1.0 / (x_entry - slope * (r + 0.5 * h))
        s4 = 1.0 / (x_entry - slope * (r + h))
        k1x = -g * s1 * x * y
        k1y = g * y * (s1 * x - 1.0)
        ax = x + 0.5 * h * k1x
        ay = y + 0.5 * h * k1y
        k2x = -g * s2 * ax * ay
        k2y = g * ay * (s2 * ax - 1.0)
        bx = x + 0.5 * h * k2x
        by = y + 0.5 * h * k2y
        k3x = -g * s2 * bx * by
        k3y = g * by * (s2 * bx - 1.0)
        cx = x + h * k3x
        cy = y + h * k3y
        k4x = -g * s4 * cx * cy
        k4y = g * cy * (s4 * cx - 1.0)
        x = x + (h / 6.0) * (k1x + 2.0 * (k2x + k3x) + k4x)
        y = y + (h / 6.0) * (k1y + 2.0 * (k2y + k3y) + k4y)
        v = v + (h / 6.0) * (s1 + 4.0 * s2 + s4)
        xs[i + 1] = x
        ys[i + 1] = y
        vs[i + 1] = v
    return xs, ys, vs


def rk4_const_until(x: float, y: float, sigma: float, gamma: float,
                    h: float, y_stop: float, max_steps: int):
    """Integrate under constant sigma until y < y_stop (or max_steps).
    Returns (x, y, steps_taken); only the terminal state is kept."""
    g = gamma
    s = sigma
    steps = 0
    while y >= y_stop and steps < max_steps:
        k1x = -g * s * x * y
        k1y = g * y * (s * x - 1.0)
        ax = x + 0.5 * h * k1x
        ay = y + 0.5 * h * k1y
        k2x = -g * s * ax * ay
        k2y = g * ay * (s * ax - 1.0)
        bx = x + 0.5 * h * k2x
        by = y + 0.5 * h * k2y
        k3x = -g * s * bx * by
        k3y = g * by * (s * bx - 1.0)
        cx = x + h * k3x
        cy = y + h * k3y
        k4x = -g * s * cx * cy
        k4y = g * cy * (s * cx - 1.0)
        x = x + (h / 6.0) * (k1x + 2.0 * (k2x + k3x) + k4x)
        y = y + (h / 6.0) * (k1y + 2.0 * (k2y + k3y) + k4y)
        steps += 1
    return x, y, steps


def policy_tail_batch(x0, y0, v0, n_strict, h_strict, n_free, h_free,
                      sigma_s: float, sigma_f: float, gamma: float):
    """Vector of policy tails: from each start state integrate n_strict
    steps under sigma_s then n_free steps under sigma_f, tracking the
    running maximum of y.  Returns (x_end, y_end, v_end, y_max) arrays."""
    m = len(x0)
    xT = np.empty(m)
    yT = np.empty(m)
    vT = np.empty(m)
    ymax = np.empty(m)
    g = gamma
    for j in range(m):
        x = float(x0[j])
        y = float(y0[j])
        v = float(v0[j])
        top = y
        for phase in range(2):
            if phase == 0:
                s = sigma_s
                n = int(n_strict[j])
                h = float(h_strict[j])
            else:
                s = sigma_f
                n = int(n_free[j])
                h = float(h_free[j])
            for i in range(n):
                k1x = -g * s * x * y
                k1y = g * y * (s * x - 1.0)
                ax = x + 0.5 * h * k1x
                ay = y + 0.5 * h * k1y
                k2x = -g * s * ax * ay
                k2y = g * ay * (s * ax - 1.0)
                bx = x + 0.5 * h * k2x
                by = y + 0.5 * h * k2y
                k3x = -g * s * bx * by
                k3y = g * by * (s * bx - 1.0)
                cx = x + h * k3x
                cy = y + h * k3y
                k4x = -g * s * cx * cy
                k4y = g * cy * (s * cx - 1.0)
                x = x + (h / 6.0) * (k1x + 2.0 * (k2x + k3x) + k4x)
                y = y + (h / 6.0) * (k1y + 2.0 * (k2y + k3y) + k4y)
                v = v + h * s
                if y > top:
                    top = y
        xT[j] = x
        yT[j] = y
        vT[j] = v
        ymax[j] = top
    return xT, yT, vT, ymax
