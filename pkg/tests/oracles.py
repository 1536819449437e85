"""Independent reference computations for the tests.

Everything here goes through scipy (adaptive high-order integration,
adaptive quadrature, library Lambert W) so that the package's fixed-step
RK4 / Simpson / Halley paths are checked against a genuinely different
route.
"""

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.special import lambertw as scipy_lambertw

RTOL, ATOL = 1e-12, 1e-14


def rhs(t, u, gamma, sigma):
    x, y = u
    return [-gamma * sigma * x * y, gamma * y * (sigma * x - 1.0)]


def run(params, x, y, t0, t1, sigma):
    """Dense constant-sigma solution from (x, y) at t0 to t1."""
    return solve_ivp(rhs, (t0, t1), [x, y], args=(params.gamma, sigma),
                     method="DOP853", rtol=RTOL, atol=ATOL, dense_output=True)


def free_path(params):
    return run(params, params.x0, params.y0, 0.0, params.horizon, params.sigma_f)


def postponement_gain(params, t, free=None):
    """Adaptive-quadrature version of the quarantine-start indicator."""
    window = min(params.tau, params.horizon - t)
    if window <= 0.0:
        return 0.0
    if free is None:
        free = free_path(params)
    x, y = free.sol(t)
    sol = run(params, x, y, t, t + window, params.sigma_s)
    f = lambda r: (params.sigma_f * sol.sol(r)[0] - 1.0) / sol.sol(r)[1]
    val, _ = quad(f, t, t + window, limit=300)
    return val


def exit_gain(params, t1, x_entry, t2, window):
    """Adaptive-quadrature version of the cap-exit indicator."""
    if window <= 0.0:
        return 0.0
    x2 = x_entry - params.gamma * params.cap * (t2 - t1)
    sol = run(params, x2, params.cap, t2, t2 + window, params.sigma_s)
    f = lambda r: (params.sigma_f * sol.sol(r)[0] - 1.0) / sol.sol(r)[1]
    val, _ = quad(f, t2, t2 + window, limit=300)
    return val


def x_infinity(x, y, sigma):
    """Library-Lambert-W final size."""
    rho = x * np.exp(-sigma * (x + y))
    if sigma == 0.0:
        return float(x)
    return float(-scipy_lambertw(-sigma * rho).real / sigma)


def x_infinity_long_run(x, y, sigma, gamma=1.0):
    """Final size by brute integration until the infection dies out."""
    sol = solve_ivp(rhs, (0.0, 1e7), [x, y], args=(gamma, sigma),
                    method="LSODA", rtol=1e-11, atol=1e-16,
                    events=lambda t, u, *a: u[1] - 1e-13)
    return float(sol.y[0][-1])


def policy_final_size(params, t1, x_entry, t2, mu):
    """Objective for the four-phase policy, via high-accuracy integration
    of the strict phase from the closed-form arc state (the trailing free
    phase cannot change the final size)."""
    x2 = x_entry - params.gamma * params.cap * (t2 - t1)
    if mu <= 0.0:
        return x_infinity(x2, params.cap, params.sigma_f)
    sol = run(params, x2, params.cap, t2, t2 + mu, params.sigma_s)
    x3, y3 = sol.y[0][-1], sol.y[1][-1]
    return x_infinity(float(x3), float(y3), params.sigma_f)
