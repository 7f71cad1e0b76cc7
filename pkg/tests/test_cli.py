import csv
import io
import json
import subprocess
import sys

import pytest

from fieldreur.cli import RunConfig, execute, main

SINGLE_LHS = 1.459274309077043659953


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_report_single_excitation():
    code, out, err = run("report", "--omega", "2", "--excite", "0:1")
    assert code == 0
    data = json.loads(out)
    assert abs(data["report"]["lhs"] - SINGLE_LHS) < 1e-12
    assert data["report"]["rhs"] == 2.0
    assert data["state"]["occupations"] == [{"mode": 0, "n": 1}]
    assert "deficit" in err


def test_report_thermal_lattice():
    code, out, _ = run("report", "--modes", "4", "--thermal", "--beta", "1.0")
    assert code == 0
    data = json.loads(out)
    assert data["model"] == {"n_modes": 4, "spacing": 1.0, "mass": 1.0}
    assert data["report"]["deficit"] > 0


def test_report_with_monte_carlo():
    code, out, _ = run("report", "--excite", "0:1", "--mc-samples", "100000", "--seed", "3")
    mc = json.loads(out)["mc"]
    assert code == 0
    assert mc["method"] == "monte_carlo" and mc["seed"] == 3
    assert abs(mc["value"] - SINGLE_LHS) < 5 * mc["stderr"]


def test_coherent_means_report_is_tight(tmp_path):
    means = tmp_path / "means.json"
    means.write_text(json.dumps([[0.5, -1.0], [0.0, 0.0], [2.0, 0.1], [0.0, 0.3]]))
    code, out, _ = run("report", "--modes", "4", "--coherent-means", str(means))
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["lhs"] == 0.0 and rep["rhs"] == 0.0 and rep["tight"] is True


def test_report_csv(tmp_path):
    path = tmp_path / "r.csv"
    code, out, _ = run("report", "--excite", "0:2", "--format", "csv", "--out", str(path))
    assert code == 0 and out == ""
    rows = list(csv.DictReader(path.open()))
    assert float(rows[0]["rhs"]) == 4.0


def test_negative_control_exit_code():
    code, _, err = run("report", "--excite", "0:1", "--perturb-lhs", "0.6")
    assert code == 1
    assert "error" in err


def test_usage_errors():
    assert run("report", "--modes", "3")[0] == 2
    assert run("report", "--excite", "7:1", "--modes", "4")[0] == 2
    with pytest.raises(SystemExit) as exc:
        run("report", "--thermal")
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        run("report", "--vacuum", "--thermal", "--beta", "1")
    with pytest.raises(SystemExit):
        run("smeared")


def test_thermal_sweep_csv():
    code, out, _ = run("thermal-sweep", "--points", "5", "--beta-min", "0.5", "--beta-max", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "param,lhs,rhs,deficit"
    assert len(lines) == 6
    assert "\r" not in out


def test_n_sweep_json():
    code, out, _ = run("n-sweep", "--excite", "1:1", "--n-list", "8,64", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert [r["param"] for r in rows] == [8.0, 64.0]
    assert all(r["rhs"] == 2.0 for r in rows)


def test_n_sweep_svg():
    code, out, _ = run("n-sweep", "--thermal", "--beta", "1", "--n-list", "8,16", "--format", "svg")
    assert code == 0 and out.startswith("<svg")


def test_smeared():
    code, out, _ = run("smeared", "--packet", "2,0.5")
    data = json.loads(out)
    assert code == 0
    assert abs(data["report"]["rhs"] - 2.0) < 1e-7
    assert data["packet"] == {"center": 2.0, "width": 0.5}
    code, out, _ = run("smeared", "--packet", "0,1", "--mass", "2.5")
    assert code == 0 and json.loads(out)["mass"] == 2.5


def test_fig1_writes_csv_and_svg(tmp_path):
    base = tmp_path / "fig1"
    code, out, _ = run("fig1", "--out", str(base))
    assert code == 0
    rows = list(csv.DictReader((tmp_path / "fig1.csv").open()))
    assert len(rows) == 50
    assert float(rows[0]["param"]) == 0.05 and float(rows[-1]["param"]) == 10.0
    svg = (tmp_path / "fig1.svg").read_text()
    assert svg.startswith("<svg") and svg.count("<polyline") == 2


def test_verify_is_deterministic_per_seed():
    a = run("verify", "--seed", "4", "--mc-samples", "20000")
    b = run("verify", "--seed", "4", "--mc-samples", "20000")
    assert a == b
    assert a[0] == 0
    data = json.loads(a[1])
    assert data["passed"] and data["seed"] == 4
    assert run("verify", "--seed", "5", "--mc-samples", "20000")[1] != a[1]


def test_verify_fails_under_perturbation():
    code, out, _ = run("verify", "--mc-samples", "20000", "--perturb-lhs", "0.6")
    assert code == 1
    failed = {c["name"] for c in json.loads(out)["checks"] if not c["passed"]}
    assert "reur_holds_excited" in failed


def test_config_round_trip(tmp_path):
    code, dumped, _ = run("--dump-config", "report", "--modes", "8", "--excite", "1:2,-3:1")
    assert code == 0
    cfg = RunConfig.from_json(dumped)
    assert RunConfig.from_json(cfg.to_json()) == cfg
    path = tmp_path / "cfg.json"
    path.write_text(dumped)
    assert run("--config", str(path)) == run("report", "--modes", "8", "--excite", "1:2,-3:1")


def test_execute_maps_quadrature_failure(monkeypatch):
    import fieldreur.cli as cli
    from fieldreur.quadrature import QuadratureError

    def boom(*_):
        raise QuadratureError("no convergence")

    monkeypatch.setattr(cli, "smeared_one_particle_reur", boom)
    cfg = RunConfig(command="smeared", packet={"center": 0.0, "width": 1.0})
    err = io.StringIO()
    assert execute(cfg, io.StringIO(), err) == 3
    assert "quadrature" in err.getvalue()


def test_execute_maps_bad_state():
    cfg = RunConfig(state={"kind": "thermal"})
    assert execute(cfg, io.StringIO(), io.StringIO()) == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fieldreur", "report", "--excite", "0:1", "--perturb-lhs", "0.6"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1
