import csv
import io
import json

import numpy as np
import pytest

from reflectpos import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_scaling_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "spectrum", "--model", "scaling", "--s", "0.5", "--a", "2", "--n", "16")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 17
    vals = [float(r["eigenvalue"]) for r in rows]
    assert vals[0] == pytest.approx(2**-0.5, rel=1e-16) and vals[1] == pytest.approx(2**-2.5, rel=1e-16)
    assert rows[0]["eigenvalue"].startswith("0.70710678118654")
    assert len(rows[0]["eigenvalue"].replace("0.", "", 1)) >= 16


def test_hankel_atoms_json(capsys):
    code, out, _ = run(capsys, "hankel", "--atoms", "[[0.5,0.5],[-0.5,0.5]]", "--n", "8")
    assert code == 0
    rep = json.loads(out)
    assert rep["report_version"] == 1 and rep["command"] == "hankel" and rep["passed"]
    assert np.allclose(rep["results"]["eigenvalues"], [-0.5, 0.5], atol=1e-10)
    assert rep["results"]["nullity"] == 6
    assert rep["inputs"]["n"] == 8


def test_hankel_measure_file(capsys, tmp_path):
    f = tmp_path / "mu.json"
    f.write_text(json.dumps({"density": "lebesgue"}))
    code, out, _ = run(capsys, "hankel", "--measure", str(f), "--n", "6")
    assert code == 0
    nodes, _ = np.polynomial.legendre.leggauss(6)
    assert np.allclose(json.loads(out)["results"]["eigenvalues"], nodes, atol=1e-10)


def test_validate_deterministic(capsys):
    a = run(capsys, "validate", "--dim", "8", "--seed", "11")
    b = run(capsys, "validate", "--dim", "8", "--seed", "11")
    assert a[0] == 0 and a[1] == b[1]


def test_assertion_failure_exit_1(capsys):
    code, out, _ = run(capsys, "validate", "--tol", "0", "--dim", "8", "--seed", "3")
    assert code == 1 and json.loads(out)["passed"] is False


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["spectrum", "--model", "nope"],
    ["hankel", "--n", "8"],
    ["pick", "--z", "[[0.2, 0]]"],
    ["hardy", "--b", "[2.0]"],
    ["scaling", "--a", "0.5"],
    ["--config", "/nonexistent.toml", "hardy"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    payload = json.loads(err.strip().splitlines()[-1])
    assert set(payload) == {"error", "message"}


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('format = "json"\n[spectrum]\nmodel = "scaling"\nn = 3\na = 4.0\n')
    code, out, _ = run(capsys, "--config", str(cfg), "spectrum")
    rep = json.loads(out)
    assert code == 0 and len(rep["results"]["eigenvalues"]) == 4
    assert rep["results"]["eigenvalues"][0] == pytest.approx(0.5, rel=1e-15)
    code, out, _ = run(capsys, "--config", str(cfg), "spectrum", "--a", "2")
    assert json.loads(out)["inputs"]["a"] == 2.0
    jcfg = tmp_path / "run.json"
    jcfg.write_text(json.dumps({"hardy": {"n": 5}}))
    code, out, _ = run(capsys, "--config", str(jcfg), "hardy")
    assert code == 0 and json.loads(out)["inputs"]["n"] == 5


def test_output_file(capsys, tmp_path):
    dest = tmp_path / "rep.json"
    code, out, _ = run(capsys, "--output", str(dest), "hardy", "--n", "6", "--b", "[0, 0.5]")
    assert code == 0 and out == ""
    res = json.loads(dest.read_text())["results"]
    assert res["dim_hk"] == 1 and res["shift_invariance_defect"] > 0.1


def test_pick_instance(capsys, tmp_path):
    f = tmp_path / "inst.json"
    f.write_text(json.dumps({"z": [[0, 0], [0.5, 0]], "w": [[0, 0], [0.9, 0]], "variant": "pick"}))
    code, out, _ = run(capsys, "pick", "--instance", str(f))
    res = json.loads(out)["results"]
    assert code == 0 and res["agree"] and not res["matrix_psd"]


def test_sweep_eps_columns(capsys):
    code, out, _ = run(capsys, "--format", "csv", "sweep", "--kind", "eps", "--s", "[0.5]")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and {"s", "eps", "hs_norm", "j_norm"} <= set(rows[0])
    assert len(rows) == 6


def test_sweep_a_slope(capsys):
    code, out, _ = run(capsys, "sweep", "--kind", "a", "--s", "0.5")
    res = json.loads(out)["results"]
    assert code == 0 and res["slope"] == pytest.approx(-0.5, abs=1e-3)


def test_sweep_seed(capsys):
    code, out, _ = run(capsys, "sweep", "--kind", "seed", "--seeds", "10")
    assert code == 0 and json.loads(out)["results"]["pass_rate"] == 1.0


def test_spectrum_models(capsys):
    for argv in (["--model", "hardy", "--n", "4"], ["--model", "random", "--dim", "6"],
                 ["--model", "hankel", "--atoms", "[[0.25, 1.0]]", "--n", "3"]):
        code, out, _ = run(capsys, "spectrum", *argv)
        assert code == 0 and json.loads(out)["results"]["eigenvalues"]
