"""Command-line interface: solve, sweep-tau, oracle, verify-pmp.

All data files are written with fixed 12-significant-digit float
formatting and no timestamps, so identical configs reproduce identical
bytes.  Exit codes: 0 ok, 2 usage/config error, 3 infeasible problem,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import BACKEND
from .constrained import ConstrainedPolicy, solve_constrained
from .dynamics import integrate
from .errors import InvalidParams, NumericalFailure, SircapError
from .model import ControlSchedule, EpidemicParams
from .oracle import grid_search
from .pmp import check_switching_structure, integrate_adjoint

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4

_SCHEMA = {
    # name: (required, type, default)
    "gamma": (True, float, None),
    "sigma_s": (True, float, None),
    "sigma_f": (True, float, None),
    "horizon": (True, float, None),
    "tau": (True, float, None),
    "cap": (True, float, None),
    "x0": (True, float, None),
    "y0": (True, float, None),
    "step": (False, float, 0.01),
    "event_tol": (False, float, 1e-6),
    "root_tol": (False, float, 1e-6),
    "oracle_resolution": (False, int, 100),
    "oracle_refinements": (False, int, 2),
    "oracle_step": (False, float, 0.05),
    "workers": (False, int, 1),
    "out_dir": (False, str, "out"),
}


class ConfigError(Exception):
    pass


def _fnum(x: float) -> float:
    """Round-trip through 12 significant digits for stable serialization."""
    return float(format(float(x), ".12g"))


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        return _fnum(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    return obj


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_clean(payload), sort_keys=True, indent=2) + "\n")


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(c) if isinstance(c, (float, np.floating)) else str(c)
                              for c in row))
    path.write_text("\n".join(lines) + "\n")


def load_config(path: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - set(_SCHEMA)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = {}
    for key, (required, typ, default) in _SCHEMA.items():
        if key in raw:
            val = raw[key]
            if typ is float and isinstance(val, (int, float)) and not isinstance(val, bool):
                cfg[key] = float(val)
            elif typ is int and isinstance(val, int) and not isinstance(val, bool):
                cfg[key] = val
            elif typ is str and isinstance(val, str):
                cfg[key] = val
            else:
                raise ConfigError(f"config key {key!r} must be of type {typ.__name__}")
        elif required:
            raise ConfigError(f"missing required config key: {key!r}")
        else:
            cfg[key] = default
    return cfg


def _params(cfg: dict) -> EpidemicParams:
    return EpidemicParams(gamma=cfg["gamma"], sigma_s=cfg["sigma_s"],
                          sigma_f=cfg["sigma_f"], horizon=cfg["horizon"],
                          tau=cfg["tau"], cap=cfg["cap"],
                          x0=cfg["x0"], y0=cfg["y0"])


def _resolve(cfg: dict, args) -> tuple[dict, Path]:
    if getattr(args, "step", None) is not None:
        cfg["step"] = args.step
    if getattr(args, "workers", None) is not None:
        cfg["workers"] = args.workers
    out = Path(args.out if args.out is not None else cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "meta.json",
                {"config": cfg, "package": "sircap", "version": __version__,
                 "kernel_backend": BACKEND})
    return cfg, out


def _policy_payload(policy: ConstrainedPolicy, pmp_report: dict | None) -> dict:
    arc = policy.geometry
    payload = {
        "case": policy.case_label,
        "t1": policy.t1,
        "t2": policy.t2,
        "mu": policy.mu,
        "x_inf": policy.x_inf_achieved,
        "y_max": policy.y_max,
        "budget_slack": policy.budget_slack,
        "feasible": policy.feasible,
        "hypothesis_ok": policy.hypothesis_ok,
        "notes": list(policy.notes),
        "arc_x_entry": arc.x_entry if arc is not None else None,
    }
    if pmp_report is not None:
        payload["pmp"] = pmp_report
    return payload


def _trajectory_rows(traj):
    for i in range(len(traj.t)):
        yield (traj.t[i], traj.x[i], traj.y[i], traj.v[i], traj.sigma[i])


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    params = _params(cfg)
    cfg, out = _resolve(cfg, args)
    policy = solve_constrained(params, step=cfg["step"], root_tol=cfg["root_tol"])
    adjoint = integrate_adjoint(policy, params, step=cfg["step"])
    report = check_switching_structure(adjoint, policy)
    _write_json(out / "policy.json", _policy_payload(policy, report.as_dict()))
    traj = integrate(params, policy.schedule, step=cfg["step"])
    _write_csv(out / "trajectory.csv", ["t", "x", "y", "v", "sigma"],
               _trajectory_rows(traj))
    print(f"case {policy.case_label}: t1={_fmt(policy.t1)} t2={_fmt(policy.t2)} "
          f"mu={_fmt(policy.mu)} x_inf={_fmt(policy.x_inf_achieved)} "
          f"pmp={'ok' if report.verified else 'UNVERIFIED'}")
    return EXIT_OK


def _sweep_one(job) -> dict:
    cfg, tau, with_oracle, with_pmp = job
    params = EpidemicParams(gamma=cfg["gamma"], sigma_s=cfg["sigma_s"],
                            sigma_f=cfg["sigma_f"], horizon=cfg["horizon"],
                            tau=tau, cap=cfg["cap"], x0=cfg["x0"], y0=cfg["y0"])
    row = {"tau": tau}
    try:
        policy = solve_constrained(params, step=cfg["step"], root_tol=cfg["root_tol"])
    except SircapError as e:
        row.update(case="error", error=str(e))
        return row
    row.update(case=policy.case_label, t1=policy.t1, t2=policy.t2, mu=policy.mu,
               x_inf=policy.x_inf_achieved)
    if with_oracle:
        grid = grid_search(params, resolution=(cfg["oracle_resolution"],) * 2,
                           refinements=cfg["oracle_refinements"],
                           step=cfg["oracle_step"])
        if grid.best is not None:
            row.update(oracle_t2=grid.best[0], oracle_mu=grid.best[1])
    if with_pmp:
        adjoint = integrate_adjoint(policy, params, step=cfg["step"])
        row["pmp_ok"] = int(check_switching_structure(adjoint, policy).verified)
    return row


def cmd_sweep_tau(args) -> int:
    cfg = load_config(args.config)
    _params(cfg)   # surface parameter problems before writing anything
    cfg, out = _resolve(cfg, args)
    taus = []
    t = args.tau_min
    while t <= args.tau_max + 1e-12:
        taus.append(round(t, 12))
        t += args.tau_step
    jobs = [(cfg, tau, args.with_oracle, args.with_pmp) for tau in taus]
    if cfg["workers"] > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg["workers"]) as pool:
            rows = list(pool.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    header = ["tau", "case", "t1", "t2", "mu", "x_inf", "oracle_t2", "oracle_mu", "pmp_ok"]
    csv_rows = []
    for r in rows:
        csv_rows.append(tuple(r.get(k, "") for k in header))
    _write_csv(out / "sweep.csv", header, csv_rows)
    boundaries = []
    for a, b in zip(rows[:-1], rows[1:]):
        if a.get("case") != b.get("case"):
            boundaries.append({"tau_lo": a["tau"], "tau_hi": b["tau"],
                               "case_lo": a.get("case"), "case_hi": b.get("case"),
                               "tau_mid": 0.5 * (a["tau"] + b["tau"])})
    _write_json(out / "boundaries.json", {"transitions": boundaries})
    print(f"swept {len(rows)} tau values; {len(boundaries)} case transitions")
    return EXIT_OK


def cmd_oracle(args) -> int:
    cfg = load_config(args.config)
    try:
        params = _params(cfg)
    except InvalidParams as e:
        cfg, out = _resolve(cfg, args)
        _write_json(out / "comparison.json", {"infeasible": True, "reason": str(e)})
        print(f"infeasible problem: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    cfg, out = _resolve(cfg, args)
    grid = grid_search(params, resolution=(cfg["oracle_resolution"],) * 2,
                       refinements=cfg["oracle_refinements"],
                       step=cfg["oracle_step"], workers=cfg["workers"])
    _write_csv(out / "surface.csv", ["t2", "mu", "x_inf", "feasible"],
               ((r[0], r[1], r[2], int(r[3])) for r in grid.rows))
    if grid.best is None:
        _write_json(out / "comparison.json",
                    {"infeasible": True, "reason": "no feasible lattice point"})
        print("no feasible lattice point", file=sys.stderr)
        return EXIT_INFEASIBLE
    policy = solve_constrained(params, step=cfg["step"], root_tol=cfg["root_tol"])
    payload = {
        "theorem": {"t2": policy.t2, "mu": policy.mu, "x_inf": policy.x_inf_achieved,
                    "case": policy.case_label},
        "oracle": {"t2": grid.best[0], "mu": grid.best[1], "x_inf": grid.best[2],
                   "t1": grid.t1, "feasible_points": grid.feasible_count,
                   "lattice_spacing": list(grid.spacing)},
        "gaps": {"t2": abs(grid.best[0] - policy.t2),
                 "mu": abs(grid.best[1] - policy.mu),
                 "x_inf": abs(grid.best[2] - policy.x_inf_achieved)},
    }
    _write_json(out / "comparison.json", payload)
    print(f"oracle ({_fmt(grid.best[0])}, {_fmt(grid.best[1])}) vs "
          f"theorem ({_fmt(policy.t2)}, {_fmt(policy.mu)})")
    return EXIT_OK


def cmd_verify_pmp(args) -> int:
    cfg = load_config(args.config)
    params = _params(cfg)
    ppath = Path(args.policy)
    if not ppath.exists():
        raise ConfigError(f"policy file not found: {ppath}")
    try:
        stored = json.loads(ppath.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"policy file is not valid JSON: {e}")
    cfg, out = _resolve(cfg, args)
    t1, t2, mu = stored["t1"], stored["t2"], stored["mu"]
    if stored.get("arc_x_entry") is not None:
        schedule = ControlSchedule.four_phase(params, t1, t2, mu, stored["arc_x_entry"])
    else:
        schedule = ControlSchedule.three_phase(params, t2, mu)
    policy = ConstrainedPolicy(
        t1=t1, t2=t2, mu=mu, case_label=stored["case"],
        x_inf_achieved=stored["x_inf"], schedule=schedule, geometry=None,
        unconstrained=None, y_max=stored.get("y_max", float("nan")),
        budget_slack=stored.get("budget_slack", 0.0),
        feasible=stored.get("feasible", True),
        hypothesis_ok=stored.get("hypothesis_ok", True))
    adjoint = integrate_adjoint(policy, params, step=cfg["step"])
    report = check_switching_structure(adjoint, policy)
    payload = report.as_dict()
    if stored.get("arc_x_entry") is None:
        payload["note"] = "no boundary arc"
    _write_json(out / "pmp_report.json", payload)
    print(f"pmp {'ok' if report.verified else 'UNVERIFIED'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sircap",
                                description="Optimal quarantine scheduling for SIR "
                                            "epidemics under a hospital-capacity cap")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="scenario config JSON")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--workers", type=int, default=None)
        sp.add_argument("--step", type=float, default=None, help="integration step")

    sp = sub.add_parser("solve", help="solve one scenario, write policy + trajectory")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("sweep-tau", help="solve over a range of budget times tau")
    common(sp)
    sp.add_argument("--tau-min", type=float, required=True)
    sp.add_argument("--tau-max", type=float, required=True)
    sp.add_argument("--tau-step", type=float, required=True)
    sp.add_argument("--with-oracle", action="store_true",
                    help="run the grid-search oracle per tau (slow)")
    sp.add_argument("--with-pmp", action="store_true",
                    help="run the costate verification per tau")
    sp.set_defaults(func=cmd_sweep_tau)

    sp = sub.add_parser("oracle", help="brute-force surface and comparison")
    common(sp)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("verify-pmp", help="costate check of a stored policy")
    common(sp)
    sp.add_argument("--policy", required=True, help="policy.json written by solve")
    sp.set_defaults(func=cmd_verify_pmp)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvalidParams) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SircapError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
