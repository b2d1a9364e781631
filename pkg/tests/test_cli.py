import csv
import io
import json

import pytest

from bdivisor.cli import main
from bdivisor.report import SCHEMA, fmt
from bdivisor.suite import RunConfig, default_ells
from fractions import Fraction


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_surface_n4(capsys):
    code, out, _ = run(capsys, "surface", "--level", "4")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == SCHEMA and doc["pass"]
    cusps = next(r for r in doc["reports"] if r["check_name"].startswith("surface/cusps"))
    assert cusps["computed"] == "6/1"


def test_surface_n3_components(capsys):
    code, out, _ = run(capsys, "surface", "--level", "3")
    doc = json.loads(out)
    comp = next(r for r in doc["reports"] if "components" in r["check_name"])
    assert code == 0 and comp["computed"] == "13/1"


@pytest.mark.parametrize("argv", [["surface", "--level", "2"], ["tower", "--depth", "-1"],
                                  ["zeta", "--window", "1"], ["zeta", "--tol", "abc"],
                                  ["zeta", "--tol", "-1"], ["dim", "--precision", "20"],
                                  ["dim", "--level", "3", "--ell", "1"], ["nonsense"], []])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_workers_env_validation(capsys, monkeypatch):
    monkeypatch.setenv("BDIVISOR_WORKERS", "zero")
    code, _, err = run(capsys, "surface")
    assert code == 2 and "BDIVISOR_WORKERS" in err


def test_tower_targets(capsys):
    code, out, _ = run(capsys, "tower", "--level", "5", "--depth", "3")
    doc = json.loads(out)
    assert code == 0
    limit = next(r for r in doc["reports"] if r["check_name"].startswith("tower/limit"))
    assert limit["target"] == "320/1"


def test_tower_csv(capsys):
    code, out, _ = run(capsys, "tower", "--depth", "2", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [r["self_int"] for r in rows] == ["130/1", "386/3", "3207/25"]


def test_zeta_window_200(capsys):
    code, out, _ = run(capsys, "zeta", "--window", "200")
    doc = json.loads(out)
    cop = doc["reports"][0]
    assert code == 0 and cop["target"] == "1/3"
    assert float(cop["bound"]) < 3e-6


def test_residue_and_toric(capsys):
    code, out, _ = run(capsys, "residue")
    doc = json.loads(out)
    assert code == 0
    r = doc["reports"][1]
    assert set(r["details"]) >= {"method", "value", "target", "abs_error", "budget"}
    code, out, _ = run(capsys, "toric")
    doc = json.loads(out)
    assert code == 0 and doc["reports"][0]["computed"] == "2/3"
    mc = next(r for r in doc["reports"] if "montecarlo" in r["check_name"])
    assert mc["details"]["seed"] == 0


def test_theta_check(capsys):
    code, out, _ = run(capsys, "theta-check")
    assert code == 0 and json.loads(out)["pass"]


def test_tight_tolerance_fails(capsys):
    code, out, _ = run(capsys, "residue", "--tol", "1e-30")
    doc = json.loads(out)
    assert code == 1 and not doc["pass"]
    # the exact side of the bookkeeping is unaffected by the tolerance
    assert doc["reports"][-1]["computed"] == "128/1"
    assert doc["config"]["tol"] == "1e-30"


def test_dim_reports_failure_and_csv(capsys):
    code, out, _ = run(capsys, "dim", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 1  # the 50/l bound is not met at N=4; see notes
    assert [r["ell"] for r in rows] == ["25", "50", "100"]
    assert all(Fraction(r["dim"]).denominator == 1 for r in rows)


def test_dim_custom_ell_target(capsys):
    code, out, _ = run(capsys, "dim", "--level", "3", "--ell", "3", "6")
    doc = json.loads(out)
    assert doc["reports"][0]["target"] == "64/1"


def test_out_file_and_determinism(tmp_path, capsys, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "toric", "--out", str(a))
    monkeypatch.setenv("BDIVISOR_WORKERS", "2")
    run(capsys, "toric", "--out", str(b))

    def strip(p):
        doc = json.loads(p.read_text())
        for r in doc["reports"]:
            r.pop("runtime_ms")
        return doc

    assert strip(a) == strip(b)


def test_default_ells():
    assert default_ells(4) == (25, 50, 100)
    assert all((4 * ell) % 3 == 0 for ell in default_ells(3))


def test_config_round_trip():
    cfg = RunConfig(ell=(1, 2)).validate()
    assert cfg.to_json()["ell"] == [1, 2]


def test_fmt_canonical():
    assert fmt(Fraction(6, 4)) == "3/2"
    assert fmt(5) == "5/1"
    assert fmt(Fraction(-2, 6)) == "-1/3"
