import json
import subprocess
import sys
from importlib import resources

import numpy as np
import pytest

from crosspos.cli import dumps, main
from crosspos.fixtures import example_map
from crosspos.polyalg import SymMapTensor, sphere_product


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    ident = SymMapTensor.from_function(3, lambda X: np.asarray(X, dtype=float))
    return {
        "ident": write(tmp_path, "ident.json", ident.to_json()),
        "phi": write(tmp_path, "phi.json", example_map().to_json()),
        "neg": write(tmp_path, "neg.json", (-sphere_product(3)).to_json()),
        "tr": write(tmp_path, "tr.json", SymMapTensor.from_function(3, lambda X: np.trace(X) * np.eye(3)).to_json()),
        "seeds": str(resources.files("crosspos.data").joinpath("example_seeds.json")),
    }


def last_json_line(out):
    return json.loads(out.strip().splitlines()[-1])


def test_usage_errors(capsys, tmp_path):
    code, _, err = run(["gen", "--n", "2"], capsys)
    assert code == 1 and "n >= 3 required" in err
    assert run(["nope"], capsys)[0] == 1
    assert run(["moments", "--n", "3"], capsys)[0] == 1
    assert run(["moments", "--n", "3", "--monomial", "q12"], capsys)[0] == 1
    assert run(["certify", str(tmp_path / "missing.json")], capsys)[0] == 1
    assert run(["mc", "--n", "3", "--monomial", "z1^2", "--trials", "10"], capsys)[0] == 1
    assert run(["nsatz3", "--map", write(tmp_path, "n2.json", SymMapTensor.from_function(
        2, lambda X: X).to_json())], capsys)[0] == 1


def test_moments(capsys):
    assert run(["moments", "--n", "3", "--monomial", "z1^4"], capsys)[1].strip() == "1/105"
    assert run(["moments", "--n", "3", "--monomial", "z12*z13"], capsys)[1].strip() == "0"
    assert run(["moments", "--n", "4", "--monomial", "z1*z2*z3*z4"], capsys)[1].strip() == "1/9600"
    code, out, _ = run(["moments", "--n", "3", "--monomial", "z12^2*z13^2"], capsys)
    assert code == 3 and "not tabulated" in out


def test_certify_identity(files, capsys):
    code, out, _ = run(["certify", files["ident"]], capsys)
    assert code == 0
    assert "completely cross-positive: YES; cross-positive: certified (trivial)" in out
    assert last_json_line(out) == {"verdicts": {"completely_cross_positive": "yes", "cross_positive": "certified"}}


def test_certify_negative(files, capsys):
    code, out, _ = run(["certify", files["neg"]], capsys)
    assert code == 0
    assert "cross-positive: falsified, witness=(" in out
    assert last_json_line(out)["verdicts"]["cross_positive"] == "falsified"


def test_certify_modes(files, capsys):
    code, out, _ = run(["certify", files["phi"], "--mode", "psatz", "--d-max", "1"], capsys)
    assert code == 0 and last_json_line(out)["verdicts"]["cross_positive"] == "certified"
    code, out, _ = run(["certify", files["phi"], "--mode", "falsify", "--restarts", "100"], capsys)
    assert code == 3 and last_json_line(out)["verdicts"]["cross_positive"] == "inconclusive"


def test_mc(files, capsys):
    code, out, _ = run(["mc", "--n", "3", "--monomial", "z1^4", "--trials", "20000", "--json"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert abs(rep["result"]["estimate"] - 1 / 105) < 4 * rep["result"]["stderr"]
    code, out, _ = run(["mc", "--poly", files["tr"], "--trials", "1000", "--json"], capsys)
    assert abs(json.loads(out)["result"]["estimate"] - 1) < 1e-12


def test_holder(capsys):
    code, out, _ = run(["holder", "--n", "5", "--class", "skew", "--trials", "10000"], capsys)
    assert code == 0 and out.startswith("max ratio ") and "<= bound 1.5651" in out
    ratio = float(out.split()[2])
    assert 1.2 < ratio <= 6 ** 0.25


def test_nsatz3(files, capsys):
    code, out, _ = run(["nsatz3", "--map", files["tr"], "--check", "denom-power"], capsys)
    assert code == 0 and out.startswith("N = 0")
    code, out, _ = run(["nsatz3", "--map", files["tr"]], capsys)
    assert code == 0 and "trace_positive: certified" in out and "det_nonneg: certified" in out
    code, out, _ = run(["nsatz3", "--map", files["tr"], "--check", "drift", "--x0", "1,0,0"], capsys)
    assert code == 2 and "hypothesis fails" in out
    assert run(["nsatz3", "--map", files["tr"], "--check", "drift"], capsys)[0] == 1


def test_gen_writes_valid_report(tmp_path, capsys, schema_validator):
    out_path = tmp_path / "run.json"
    code, out, _ = run(["gen", "--n", "3", "--seed", "7", "--out", str(out_path)], capsys)
    assert code == 0 and "status: success" in out
    rep = json.loads(out_path.read_text())
    schema_validator("run_report", rep)
    assert rep["verdicts"]["generate"] == "success"
    assert rep["files"] == [str(out_path)]
    F = rep["result"]["F"]
    schema_validator("biform", F)


def test_gen_from_seeds_file(files, capsys):
    code, out, _ = run(["gen", "--n", "3", "--seeds-file", files["seeds"]], capsys)
    assert code == 0 and "status: success" in out
    assert run(["gen", "--n", "4", "--seeds-file", files["seeds"]], capsys)[0] == 1


def test_reports_validate(files, tmp_path, capsys, schema_validator):
    cmds = [
        ["certify", files["ident"]],
        ["certify", files["neg"]],
        ["moments", "--n", "3", "--monomial", "z1^4"],
        ["moments", "--n", "3", "--monomial", "z12^2*z13^2"],
        ["mc", "--n", "3", "--monomial", "z1^2", "--trials", "1000"],
        ["holder", "--n", "3", "--class", "sym", "--trials", "100"],
        ["nsatz3", "--map", files["tr"]],
        ["nsatz3", "--map", files["tr"], "--check", "denom-power"],
        ["nsatz3", "--map", files["tr"], "--check", "drift", "--x0", "1,0,0"],
    ]
    for k, argv in enumerate(cmds):
        path = tmp_path / f"r{k}.json"
        run(argv + ["--out", str(path)], capsys)
        schema_validator("run_report", json.loads(path.read_text()))


@pytest.mark.parametrize("argv", [
    ["mc", "--n", "4", "--monomial", "w12^4", "--trials", "5000", "--seed", "3"],
    ["holder", "--n", "4", "--class", "general", "--trials", "500", "--seed", "2"],
    ["certify", "NEG", "--restarts", "50", "--seed", "5"],
])
def test_deterministic(argv, files, capsys):
    argv = [files["neg"] if a == "NEG" else a for a in argv] + ["--json"]
    a = json.loads(run(argv, capsys)[1])
    b = json.loads(run(argv, capsys)[1])
    a.pop("timings"), b.pop("timings")
    assert a == b


def test_float_format():
    assert dumps(0.1) == "0.10000000000000001"
    assert dumps({"a": [1.0 / 3, float("nan")]}) == '{"a": [0.33333333333333331,null]}'
    assert float(dumps(np.float64(2.0 / 7))) == 2.0 / 7


def test_console_script(files):
    proc = subprocess.run([sys.executable, "-m", "crosspos.cli", "moments", "--n", "3", "--monomial", "z1^4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "1/105"
