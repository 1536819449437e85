# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled integrator kernels.

Mirror of ``_kernels_py`` expression for expression; compiled with FP
contraction disabled so both backends produce bit-identical results.
"""

import numpy as np


def rk4_const(double x, double y, double v, double sigma, double gamma,
              double h, long n):
    """n RK4 steps of size h under constant sigma; returns the full path
    as three float64 arrays of length n+1."""
    xs_arr = np.empty(n + 1)
    ys_arr = np.empty(n + 1)
    vs_arr = np.empty(n + 1)
    cdef double[::1] xs = xs_arr
    cdef double[::1] ys = ys_arr
    cdef double[::1] vs = vs_arr
    cdef double g = gamma
    cdef double s = sigma
    cdef double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y
    cdef double ax, ay, bx, by, cx, cy
    cdef long i
    xs[0] = x
    ys[0] = y
    vs[0] = v
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
    return xs_arr, ys_arr, vs_arr


def rk4_arc(double x, double y, double v, double x_entry, double slope,
            double rel0, double gamma, double h, long n):
    """n RK4 steps under the holding control sigma(r) = 1/(x_entry - slope*r),
    where r is time since arc entry; the first step starts at r = rel0."""
    xs_arr = np.empty(n + 1)
    ys_arr = np.empty(n + 1)
    vs_arr = np.empty(n + 1)
    cdef double[::1] xs = xs_arr
    cdef double[::1] ys = ys_arr
    cdef double[::1] vs = vs_arr
    cdef double g = gamma
    cdef double r, s1, s2, s4
    cdef double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y
    cdef double ax, ay, bx, by, cx, cy
    cdef long i
    xs[0] = x
    ys[0] = y
    vs[0] = v
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
    return xs_arr, ys_arr, vs_arr


def rk4_const_until(double x, double y, double sigma, double gamma,
                    double h, double y_stop, long max_steps):
    """Integrate under constant sigma until y < y_stop (or max_steps).
    Returns (x, y, steps_taken); only the terminal state is kept."""
    cdef double g = gamma
    cdef double s = sigma
    cdef double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y
    cdef double ax, ay, bx, by, cx, cy
    cdef long steps = 0
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


def policy_tail_batch(double[::1] x0, double[::1] y0, double[::1] v0,
                      long[::1] n_strict, double[::1] h_strict,
                      long[::1] n_free, double[::1] h_free,
                      double sigma_s, double sigma_f, double gamma):
    """Vector of policy tails: from each start state integrate n_strict
    steps under sigma_s then n_free steps under sigma_f, tracking the
    running maximum of y.  Returns (x_end, y_end, v_end, y_max) arrays."""
    cdef long m = x0.shape[0]
    xT_arr = np.empty(m)
    yT_arr = np.empty(m)
    vT_arr = np.empty(m)
    ymax_arr = np.empty(m)
    cdef double[::1] xT = xT_arr
    cdef double[::1] yT = yT_arr
    cdef double[::1] vT = vT_arr
    cdef double[::1] ymax = ymax_arr
    cdef double g = gamma
    cdef double x, y, v, top, s, h
    cdef double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y
    cdef double ax, ay, bx, by, cx, cy
    cdef long j, i, n, phase
    for j in range(m):
        x = x0[j]
        y = y0[j]
        v = v0[j]
        top = y
        for phase in range(2):
            if phase == 0:
                s = sigma_s
                n = n_strict[j]
                h = h_strict[j]
            else:
                s = sigma_f
                n = n_free[j]
                h = h_free[j]
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
    return xT_arr, yT_arr, vT_arr, ymax_arr
