#!/usr/bin/env python3
"""Benchmark the compiled integrator kernels against the pure-Python
fallback.  Run from the repository root:

    python benchmarks/bench_kernels.py [--repeats N]

The two backends execute identical arithmetic; this script reports the
wall-clock ratio and verifies the outputs agree bit for bit.
"""

import argparse
import time

import numpy as np


def _load_backends():
    from sircap import _kernels_py
    try:
        from sircap import _kernels
    except ImportError:
        _kernels = None
    return _kernels, _kernels_py


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    compiled, pure = _load_backends()
    if compiled is None:
        print("compiled extension not available; only timing the fallback")

    cases = []
    cases.append(("rk4_const  (365 days @ 0.01)",
                  lambda k: k.rk4_const(1 - 1e-6, 1e-6, 0.0, 1.5, 0.1, 0.01, 36500)))
    cases.append(("rk4_arc    (80 days @ 0.01)",
                  lambda k: k.rk4_arc(0.9, 0.03, 30.0, 0.9, 0.003, 0.0, 0.1, 0.01, 8000)))
    cases.append(("rk4_const_until (decay to 1e-12)",
                  lambda k: k.rk4_const_until(0.6, 0.01, 1.5, 0.1, 0.01, 1e-12, 10**7)))

    rng = np.random.default_rng(42)
    m = 400
    x0 = rng.uniform(0.7, 0.9, m)
    y0 = np.full(m, 0.03)
    v0 = rng.uniform(100.0, 300.0, m)
    ns = rng.integers(500, 4000, m)
    hs = np.full(m, 0.05)
    nf = rng.integers(500, 4000, m)
    hf = np.full(m, 0.05)
    cases.append((f"policy_tail_batch ({m} tails)",
                  lambda k: k.policy_tail_batch(x0, y0, v0, ns, hs, nf, hf,
                                                0.8, 1.5, 0.1)))

    print(f"{'kernel':36s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}  match")
    for name, call in cases:
        t_py, out_py = _time(lambda: call(pure), args.repeats)
        if compiled is None:
            print(f"{name:36s} {t_py * 1e3:9.2f}ms {'-':>10s} {'-':>8s}")
            continue
        t_c, out_c = _time(lambda: call(compiled), args.repeats)
        if isinstance(out_py, tuple):
            same = all(np.array_equal(np.asarray(a), np.asarray(b))
                       for a, b in zip(out_py, out_c))
        else:
            same = out_py == out_c
        print(f"{name:36s} {t_py * 1e3:9.2f}ms {t_c * 1e3:9.2f}ms "
              f"{t_py / t_c:7.1f}x  {'bitwise' if same else 'DIFFER'}")

    # end to end: one full constrained solve per backend
    import os
    import subprocess
    import sys
    snippet = (
        "import time; from sircap.model import EpidemicParams; "
        "from sircap.constrained import solve_constrained; "
        "p = EpidemicParams(gamma=0.1, sigma_s=0.8, sigma_f=1.5, horizon=365.0, "
        "tau=40.0, cap=0.03, x0=1-1e-6, y0=1e-6); "
        "t0 = time.perf_counter(); pol = solve_constrained(p); "
        "print(f'{time.perf_counter()-t0:.3f}s  t2={pol.t2:.6f}')"
    )
    for backend in ("compiled", "python"):
        env = dict(os.environ, SIRCAP_KERNELS=backend)
        r = subprocess.run([sys.executable, "-c", snippet], env=env,
                           capture_output=True, text=True)
        tag = r.stdout.strip() if r.returncode == 0 else r.stderr.strip().splitlines()[-1]
        print(f"solve_constrained [{backend:8s}]  {tag}")


if __name__ == "__main__":
    main()
