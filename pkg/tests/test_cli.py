import json
from pathlib import Path

import pytest

from sircap.cli import main

FAST = {
    "gamma": 0.25, "sigma_s": 0.6, "sigma_f": 1.6,
    "horizon": 80.0, "tau": 10.0, "cap": 0.05,
    "x0": 0.9999, "y0": 1e-4,
    "oracle_resolution": 30, "oracle_refinements": 1, "oracle_step": 0.1,
}


def write_config(tmp_path, name="cfg.json", **overrides):
    cfg = dict(FAST)
    cfg.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


class TestSolve:
    def test_writes_policy_and_trajectory(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "run"
        assert main(["solve", "--config", str(cfg), "--out", str(out)]) == 0
        policy = json.loads((out / "policy.json").read_text())
        assert policy["case"] == "2.1"
        assert policy["feasible"] is True
        assert policy["pmp"]["verified"] is True
        lines = (out / "trajectory.csv").read_text().splitlines()
        assert lines[0] == "t,x,y,v,sigma"
        assert len(lines) > 1000
        meta = json.loads((out / "meta.json").read_text())
        assert meta["config"]["step"] == 0.01     # default echoed

    def test_generous_cap_passthrough(self, tmp_path):
        cfg = write_config(tmp_path, cap=0.9)
        out = tmp_path / "run"
        assert main(["solve", "--config", str(cfg), "--out", str(out)]) == 0
        policy = json.loads((out / "policy.json").read_text())
        assert policy["case"].startswith("1.")
        assert policy["arc_x_entry"] is None
        assert policy["t1"] == policy["t2"]

    def test_malformed_json_exits_2_without_output(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        out = tmp_path / "nothing"
        assert main(["solve", "--config", str(bad), "--out", str(out)]) == 2
        assert not out.exists()

    def test_unknown_key_rejected(self, tmp_path):
        cfg = write_config(tmp_path, extra_knob=1.0)
        assert main(["solve", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2

    def test_missing_key_rejected(self, tmp_path):
        cfg = dict(FAST)
        del cfg["gamma"]
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        assert main(["solve", "--config", str(path), "--out", str(tmp_path / "o")]) == 2

    def test_reproducible_bytes(self, tmp_path):
        cfg = write_config(tmp_path)
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["solve", "--config", str(cfg), "--out", str(a)]) == 0
        assert main(["solve", "--config", str(cfg), "--out", str(b)]) == 0
        for name in ("policy.json", "trajectory.csv", "meta.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()


class TestVerifyPmp:
    def test_roundtrip(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "run"
        main(["solve", "--config", str(cfg), "--out", str(out)])
        rc = main(["verify-pmp", "--config", str(cfg),
                   "--policy", str(out / "policy.json"), "--out", str(out)])
        assert rc == 0
        report = json.loads((out / "pmp_report.json").read_text())
        assert report["verified"] is True

    def test_missing_policy_file(self, tmp_path):
        cfg = write_config(tmp_path)
        rc = main(["verify-pmp", "--config", str(cfg),
                   "--policy", str(tmp_path / "absent.json"),
                   "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_no_arc_note(self, tmp_path):
        cfg = write_config(tmp_path, cap=0.9)
        out = tmp_path / "run"
        main(["solve", "--config", str(cfg), "--out", str(out)])
        main(["verify-pmp", "--config", str(cfg),
              "--policy", str(out / "policy.json"), "--out", str(out)])
        report = json.loads((out / "pmp_report.json").read_text())
        assert report["note"] == "no boundary arc"


class TestOracle:
    def test_surface_and_comparison(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "orc"
        assert main(["oracle", "--config", str(cfg), "--out", str(out)]) == 0
        rows = (out / "surface.csv").read_text().splitlines()
        assert rows[0] == "t2,mu,x_inf,feasible"
        assert len(rows) - 1 == 30 * 30
        comp = json.loads((out / "comparison.json").read_text())
        assert comp["gaps"]["t2"] <= 0.1
        assert comp["gaps"]["mu"] <= 0.1

    def test_infeasible_params_exit_3(self, tmp_path):
        cfg = write_config(tmp_path, y0=0.06)    # starts above the cap
        out = tmp_path / "orc"
        assert main(["oracle", "--config", str(cfg), "--out", str(out)]) == 3
        comp = json.loads((out / "comparison.json").read_text())
        assert comp["infeasible"] is True

    def test_worker_count_invariant(self, tmp_path):
        cfg = write_config(tmp_path, oracle_resolution=20, oracle_refinements=0)
        a, b = tmp_path / "w1", tmp_path / "w2"
        assert main(["oracle", "--config", str(cfg), "--out", str(a),
                     "--workers", "1"]) == 0
        assert main(["oracle", "--config", str(cfg), "--out", str(b),
                     "--workers", "2"]) == 0
        assert (a / "surface.csv").read_bytes() == (b / "surface.csv").read_bytes()
        assert (a / "comparison.json").read_bytes() == (b / "comparison.json").read_bytes()


class TestSweep:
    def test_sweep_rows_and_boundaries(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "sweep"
        rc = main(["sweep-tau", "--config", str(cfg), "--out", str(out),
                   "--tau-min", "8", "--tau-max", "32", "--tau-step", "8"])
        assert rc == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[0] == "tau,case,t1,t2,mu,x_inf,oracle_t2,oracle_mu,pmp_ok"
        assert len(lines) == 1 + 4
        cases = [ln.split(",")[1] for ln in lines[1:]]
        assert cases == ["2.1", "2.1", "2.2", "2.3"]
        bounds = json.loads((out / "boundaries.json").read_text())
        assert len(bounds["transitions"]) == 2

    def test_empty_range_gives_header_only(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "sweep"
        rc = main(["sweep-tau", "--config", str(cfg), "--out", str(out),
                   "--tau-min", "30", "--tau-max", "20", "--tau-step", "5"])
        assert rc == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines == ["tau,case,t1,t2,mu,x_inf,oracle_t2,oracle_mu,pmp_ok"]
        bounds = json.loads((out / "boundaries.json").read_text())
        assert bounds["transitions"] == []

    def test_workers_do_not_change_bytes(self, tmp_path):
        cfg = write_config(tmp_path)
        a, b = tmp_path / "w1", tmp_path / "w2"
        args = ["sweep-tau", "--config", str(cfg), "--tau-min", "8",
                "--tau-max", "24", "--tau-step", "8"]
        assert main(args + ["--out", str(a), "--workers", "1"]) == 0
        assert main(args + ["--out", str(b), "--workers", "3"]) == 0
        assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()

    def test_optional_columns_populated(self, tmp_path):
        cfg = write_config(tmp_path, oracle_resolution=25, oracle_refinements=1)
        out = tmp_path / "sweep"
        rc = main(["sweep-tau", "--config", str(cfg), "--out", str(out),
                   "--tau-min", "10", "--tau-max", "10", "--tau-step", "1",
                   "--with-oracle", "--with-pmp"])
        assert rc == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        row = dict(zip(lines[0].split(","), lines[1].split(",")))
        assert row["pmp_ok"] == "1"
        assert abs(float(row["oracle_t2"]) - float(row["t2"])) <= 0.2
