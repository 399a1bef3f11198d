import csv
import hashlib
import json

import pytest
import yaml

from twotemp import __version__
from twotemp.cli_driver import load_config, main
from twotemp.errors import ValidationError


def write(tmp_path, payload, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(payload))
    return str(path)


def run(tmp_path, command, payload, out="out", *extra):
    cfg = write(tmp_path, payload)
    return main([command, "--config", cfg, "--out", str(tmp_path / out), *extra])


def test_unknown_key_is_rejected(tmp_path, capsys):
    assert run(tmp_path, "coeffs", {"gas": {"delta": 2, "gamma": 1.4}}) == 2
    assert "invalid config" in capsys.readouterr().err


def test_task_must_match_command(tmp_path):
    assert run(tmp_path, "shock", {"task": "coeffs"}) == 2


def test_invalid_gas_maps_to_exit_2(tmp_path):
    assert run(tmp_path, "coeffs", {"gas": {"delta": 1.0}}) == 2


def test_output_directory_resolution(tmp_path, monkeypatch):
    cfg = write(tmp_path, {"output": {"directory": "from-file"}})
    assert load_config(cfg, "coeffs").output.directory == "from-file"
    assert load_config(cfg, "coeffs", out="flag").output.directory == "flag"
    bare = write(tmp_path, {}, "bare.yaml")
    monkeypatch.setenv("TWOTEMP_OUT", "from-env")
    assert load_config(bare, "coeffs").output.directory == "from-env"
    monkeypatch.delenv("TWOTEMP_OUT")
    assert load_config(bare, "coeffs", seed=9).numerics.seed == 9
    with pytest.raises(ValidationError):
        load_config(tmp_path / "missing.yaml", "coeffs")


COEFFS = {"gas": {"delta": 3, "alpha": 0.5, "beta": 0.5},
          "state": {"rho": 1.0, "t_tr": 1.5, "t_int": 1.0},
          "numerics": {"basis": [4, 2], "basis_ladder": [[3, 2], [4, 2]]}}


def test_coeffs_deterministic_with_manifest(tmp_path):
    assert run(tmp_path, "coeffs", COEFFS, "a") == 0
    assert run(tmp_path, "coeffs", COEFFS, "b") == 0
    a = (tmp_path / "a" / "coeffs.json").read_bytes()
    assert a == (tmp_path / "b" / "coeffs.json").read_bytes()
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["version"] == __version__ and manifest["command"] == "coeffs"
    assert manifest["artifacts"]["coeffs.json"] == hashlib.sha256(a).hexdigest()
    data = json.loads(a)
    assert data["coefficients"]["lambda_mu"] > 0
    assert data["coefficients"]["k_relax"] is not None
    with open(tmp_path / "a" / "coeffs.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["name", "value", "uncertainty"]


def test_riemann_run(tmp_path):
    payload = {"gas": {"delta": 2}, "numerics": {"cells": 200}}
    assert run(tmp_path, "riemann", payload) == 0
    report = json.loads((tmp_path / "out" / "riemann.json").read_text())
    assert report["relative_l1"]["rho"] < 0.02
    with open(tmp_path / "out" / "riemann.csv") as fh:
        header = next(csv.reader(fh))
    assert header == ["x", "rho", "u", "p", "rho_exact", "u_exact", "p_exact"]


def test_relax_run_without_particles(tmp_path):
    payload = {"gas": {"delta": 2, "alpha": 0.5, "beta": 0.5, "theta": 0.05},
               "state": {"t_tr": 2.0, "t_int": 1.0},
               "numerics": {"snapshots": 5, "run_dsmc": False}}
    assert run(tmp_path, "relax", payload) == 0
    summary = json.loads((tmp_path / "out" / "relax.json").read_text())
    # second-order splitting at dt = t_end / 100
    assert summary["fluid_max_abs_error"] < 1e-6


def test_verify_subset_and_fault(tmp_path, capsys):
    assert run(tmp_path, "verify", {"numerics": {"checks": [1, 2, 3]}}, "ok") == 0
    data = json.loads((tmp_path / "ok" / "verify.json").read_text())
    assert [c["status"] for c in data["checks"]] == ["PASS"] * 3
    assert all("runtime" not in c for c in data["checks"])
    faulty = {"numerics": {"checks": [3], "fault_c_s_scale": 1.001}}
    assert run(tmp_path, "verify", faulty, "bad") == 4
    assert "failed checks: [3]" in capsys.readouterr().out


def test_verify_skips_inelastic_checks_when_theta_is_zero(tmp_path):
    payload = {"gas": {"theta": 0.0}, "numerics": {"checks": [4, 12]}}
    assert run(tmp_path, "verify", payload) == 0
    data = json.loads((tmp_path / "out" / "verify.json").read_text())
    assert [c["status"] for c in data["checks"]] == ["SKIP", "SKIP"]


def test_verify_rejects_unknown_check(tmp_path):
    assert run(tmp_path, "verify", {"numerics": {"checks": [13]}}) == 2
