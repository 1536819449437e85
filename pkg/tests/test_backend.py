"""The compiled kernels and the pure-Python fallback must agree bit for
bit: same arithmetic, same order, contraction disabled in the extension."""

import os
import subprocess
import sys

import numpy as np
import pytest

from sircap import _backend, _kernels_py

compiled = pytest.importorskip("sircap._kernels",
                               reason="compiled extension not built")


CASES = [
    dict(x=1 - 1e-6, y=1e-6, v=0.0, sigma=1.5, gamma=0.1, h=0.01, n=20000),
    dict(x=0.7, y=0.2, v=12.0, sigma=0.4, gamma=0.25, h=0.05, n=3000),
    dict(x=0.9, y=0.05, v=0.0, sigma=2.2, gamma=0.08, h=0.02, n=5000),
]


@pytest.mark.parametrize("case", CASES)
def test_const_paths_bitwise_equal(case):
    a = compiled.rk4_const(case["x"], case["y"], case["v"], case["sigma"],
                           case["gamma"], case["h"], case["n"])
    b = _kernels_py.rk4_const(case["x"], case["y"], case["v"], case["sigma"],
                              case["gamma"], case["h"], case["n"])
    for u, w in zip(a, b):
        assert np.array_equal(u, w)


def test_arc_paths_bitwise_equal():
    a = compiled.rk4_arc(0.9, 0.03, 5.0, 0.9, 0.0075, 0.0, 0.25, 0.01, 4000)
    b = _kernels_py.rk4_arc(0.9, 0.03, 5.0, 0.9, 0.0075, 0.0, 0.25, 0.01, 4000)
    for u, w in zip(a, b):
        assert np.array_equal(u, w)


def test_decay_terminal_state_bitwise_equal():
    a = compiled.rk4_const_until(0.6, 0.01, 1.5, 0.1, 0.01, 1e-12, 10**7)
    b = _kernels_py.rk4_const_until(0.6, 0.01, 1.5, 0.1, 0.01, 1e-12, 10**7)
    assert a == b


def test_batch_bitwise_equal():
    rng = np.random.default_rng(3)
    m = 50
    x0 = rng.uniform(0.6, 0.9, m)
    y0 = rng.uniform(0.01, 0.05, m)
    v0 = rng.uniform(0.0, 100.0, m)
    ns = rng.integers(0, 2000, m)
    hs = np.full(m, 0.05)
    nf = rng.integers(0, 2000, m)
    hf = np.full(m, 0.05)
    a = compiled.policy_tail_batch(x0, y0, v0, ns, hs, nf, hf, 0.6, 1.6, 0.25)
    b = _kernels_py.policy_tail_batch(x0, y0, v0, ns, hs, nf, hf, 0.6, 1.6, 0.25)
    for u, w in zip(a, b):
        assert np.array_equal(u, w)


def test_backend_selection_reports():
    assert _backend.BACKEND in ("compiled", "python")


def test_fallback_solves_end_to_end():
    # a full solve under the pure-Python kernels must reproduce the
    # compiled result exactly
    snippet = (
        "from sircap.constrained import solve_constrained\n"
        "from sircap.model import EpidemicParams\n"
        "p = EpidemicParams(gamma=0.25, sigma_s=0.6, sigma_f=1.6, horizon=80.0,"
        " tau=10.0, cap=0.05, x0=1-1e-4, y0=1e-4)\n"
        "pol = solve_constrained(p)\n"
        "print(repr(pol.t2), repr(pol.mu), repr(pol.x_inf_achieved))\n"
    )
    out = {}
    for backend in ("python", "compiled"):
        env = dict(os.environ, SIRCAP_KERNELS=backend)
        r = subprocess.run([sys.executable, "-c", snippet], env=env,
                           capture_output=True, text=True, timeout=600)
        assert r.returncode == 0, r.stderr
        out[backend] = r.stdout
    assert out["python"] == out["compiled"]
