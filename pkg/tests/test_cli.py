import json
import subprocess
import sys

import numpy as np
import pytest

from entassist import cli, jsonio, simulate, treasure
from entassist.errors import ParseError
from entassist.membership import verify_cn_sr_certificate


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out else None), out.err


def test_treasure_report(capsys):
    code, rep, _ = run(capsys, "treasure")
    assert code == 0
    assert rep["results"]["overall"] == pytest.approx((4 + np.sqrt(2)) / 6, abs=1e-9)
    assert rep["results"]["classical_2"] == pytest.approx(5 / 6, abs=1e-12)
    assert rep["results"]["config_order"][0] == "{1,2}"
    assert all(c["passed"] for c in rep["checks"])


def test_decompose_builtin_round_trip(capsys, tmp_path):
    out = tmp_path / "dec.json"
    code, rep, _ = run(capsys, "decompose", "--out", str(out))
    assert code == 0
    assert rep["results"]["reconstruction_error"] <= 1e-8
    assert rep["results"]["max_support"] == 4
    dec = jsonio.decomposition_from_json(jsonio.load_file(out))
    assert verify_cn_sr_certificate(treasure.induced_channel(), dec, 4)


def test_decompose_generated_instance(capsys, tmp_path):
    path = tmp_path / "inst.json"
    code, _, _ = run(capsys, "instance", "--seed", "4", "--k", "3", "--l", "5", "--out", str(path))
    assert code == 0
    code, rep, _ = run(capsys, "decompose", "--in", str(path))
    assert code == 0 and rep["results"]["k"] == 3 and rep["results"]["l"] == 5


def test_instance_round_trip_is_exact(tmp_path):
    inst = simulate.random_theorem_instance(np.random.default_rng(1), 2, 4, 3)
    back = jsonio.instance_from_json(jsonio.loads(jsonio.dumps(jsonio.instance_to_json(inst))))
    for a, b in zip(inst.e_plus + inst.e_minus, back.e_plus + back.e_minus):
        np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(inst.target.matrix, back.target.matrix)


def test_missing_field_is_named(capsys, tmp_path):
    obj = jsonio.instance_to_json(treasure.theorem_instance())
    del obj["betas"]
    path = tmp_path / "cut.json"
    path.write_text(json.dumps(obj))
    code, rep, err = run(capsys, "decompose", "--in", str(path))
    assert code == 2 and rep is None
    assert "missing field 'betas'" in err
    with pytest.raises(ParseError, match="missing field 'betas'"):
        jsonio.instance_from_json(obj)


def test_truncated_json_reports_position(capsys, tmp_path):
    path = tmp_path / "trunc.json"
    path.write_text(jsonio.dumps(jsonio.instance_to_json(treasure.theorem_instance()))[:200])
    code, _, err = run(capsys, "decompose", "--in", str(path))
    assert code == 2 and "invalid JSON at line" in err


def test_invalid_instance_is_a_parse_error(tmp_path):
    obj = jsonio.instance_to_json(treasure.theorem_instance())
    obj["e_plus"][0] = [[[2, 0], [0, 0]], [[0, 0], [0, 0]]]
    with pytest.raises(ParseError):
        jsonio.instance_from_json(obj)


def test_membership_reports(capsys, tmp_path):
    code, rep, _ = run(capsys, "membership", "--n", "2")
    assert code == 0 and rep["results"]["feasible"] is False
    assert rep["results"]["witness_gap"] == pytest.approx(0.0690356, abs=1e-7)
    code, rep, _ = run(capsys, "membership", "--n", "4")
    assert code == 0 and rep["results"]["feasible"] is True
    path = tmp_path / "ch.json"
    path.write_text(json.dumps({"convention": "column-stochastic", "matrix": [[0.2, 1, 0], [0.3, 0, 0], [0.5, 0, 1]]}))
    code, rep, _ = run(capsys, "membership", "--in", str(path), "--n", "3")
    assert code == 0 and rep["results"]["feasible"] is True


def test_channel_convention_is_enforced():
    with pytest.raises(ParseError, match="convention"):
        jsonio.channel_from_json({"convention": "row-stochastic", "matrix": [[1.0]]})
    with pytest.raises(ParseError, match="outputs"):
        jsonio.channel_from_json({"outputs": 3, "matrix": [[1.0]]})


def test_property_suites(capsys):
    code, rep, _ = run(capsys, "props", "lemma2", "--trials", "200")
    assert code == 0 and rep["seed"] == 0 and rep["results"]["min_slack"] >= -1e-10
    code, rep, _ = run(capsys, "props", "gamma", "--trials", "50", "--seed", "3")
    assert code == 0 and rep["seed"] == 3
    code, rep, _ = run(capsys, "props", "remark", "--trials", "100")
    assert code == 0 and rep["results"]["maximally_mixed"] == {"symmetrized": 0, "sqrt_sandwich": 0}
    code, _, err = run(capsys, "props", "bogus")
    assert code == 2 and "unknown suite" in err
    code, _, _ = run(capsys, "props", "lemma2", "--trials", "0")
    assert code == 2


def test_reports_are_byte_identical_on_rerun(capsys):
    cli.main(["props", "nonsignaling", "--trials", "30", "--seed", "5"])
    first = capsys.readouterr().out
    cli.main(["props", "nonsignaling", "--trials", "30", "--seed", "5"])
    assert capsys.readouterr().out == first


def test_failed_check_exits_one(capsys):
    # the four-box reconstruction carries a few ulps of rounding, so a 1e-20 tolerance must fail
    code, rep, _ = run(capsys, "decompose", "--tol", "1e-20")
    assert rep["results"]["reconstruction_error"] > 1e-20
    assert code == 1
    assert not next(c for c in rep["checks"] if c["name"] == "reconstruction_error")["passed"]


def test_usage_error_exit_code():
    proc = subprocess.run([sys.executable, "-m", "entassist.cli", "membership", "--n", "x"], capture_output=True)
    assert proc.returncode == 2


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "entassist.cli", "treasure"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["command"] == "treasure"
