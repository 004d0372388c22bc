import csv
import json

import numpy as np
import pytest

from prandtl import acceptance, cli
from prandtl.cli import RunConfig, main, parse_config
from prandtl.errors import ConfigError

ELLIPTIC = '{"command":"solve","coefficient":{"kind":"elliptic","p0":2.0},"rhs":{"kind":"one"}}'


def write(tmp_path, text, name="c.json"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# ------------------------------------------------------------ parsing

def test_defaults():
    c = parse_config(ELLIPTIC)
    assert (c.n, c.L, c.tol, c.max_iter) == (4096, 12.0, 1e-10, 5000)
    assert c.coefficient.kind == "elliptic" and c.coefficient.M == 0.5
    assert c.rhs.kind == "one" and c.command == "solve"


def test_triangular_bound_filled_in():
    assert parse_config('{"coefficient":{"kind":"triangular","p0":1.0}}').coefficient.M == 2.0


def test_full_document():
    c = parse_config(json.dumps({
        "command": "transform", "grid": {"n": 1024, "L": 10, "pad": 2},
        "solver": {"tol": 1e-12, "max_iter": 50, "tail_correction": False},
        "coefficient": {"kind": "tabulated", "samples": [[-0.5, 1.0], [0.5, 2.0]]},
        "rhs": {"kind": "tabulated", "samples": [[0.5, 1.0], [-0.5, 0.0]]}, "output": "x"}))
    assert c.pad == 2 and not c.tail_correction and c.coefficient.M == pytest.approx(0.75)
    f = c.rhs.callable()
    np.testing.assert_allclose(f(np.array([-0.9, 0.0, 0.9])), [0.0, 0.5, 1.0])


def test_cosine_frequency():
    f = parse_config('{"rhs":{"kind":"cosine","frequency":2.0}}').rhs.callable()
    assert f(np.array([0.5]))[0] == pytest.approx(np.cos(1.0))
    g = parse_config('{"rhs":{"kind":"cosine"}}').rhs.callable()
    assert g(np.array([1.0]))[0] == pytest.approx(0.0, abs=1e-15)


def test_syntax_error_has_position():
    with pytest.raises(ConfigError, match=r"line 2, column \d+"):
        parse_config('{"grid":\n {"n": 4096,}}')


@pytest.mark.parametrize("text,needle", [
    ('{"grid":{"n":1000}}', "n must be a power of two"),
    ('{"grid":{"n":128}}', "grid.n must lie in"),
    ('{"grid":{"n":2097152}}', "grid.n must lie in"),
    ('{"grid":{"n":4096.0}}', "grid.n must be an integer"),
    ('{"grid":{"L":3}}', "grid.L must lie in"),
    ('{"grid":{"L":40}}', "grid.L"),
    ('{"grid":{"pad":3}}', "grid.pad"),
    ('{"solver":{"tol":1e-3}}', "solver.tol"),
    ('{"solver":{"tol":1e-15}}', "solver.tol"),
    ('{"solver":{"max_iter":0}}', "solver.max_iter"),
    ('{"solver":{"tail_correction":1}}', "tail_correction"),
    ('{"coefficient":{"kind":"oval"}}', "coefficient"),
    ('{"coefficient":{"kind":"constant","p0":-1}}', "coefficient"),
    ('{"coefficient":{"kind":"triangular","p0":1.0,"M":1.0}}', "exceeds"),
    ('{"rhs":{"kind":"tabulated"}}', "rhs.samples"),
    ('{"rhs":{"kind":"one","samples":[[0,1],[0.5,1]]}}', "rhs.samples"),
    ('{"rhs":{"kind":"tabulated","samples":[[1.0,1],[0.5,1]]}}', "abscissae"),
    ('{"rhs":{"kind":"spline"}}', "rhs.kind"),
    ('{"command":"plot"}', "command"),
    ('{"colour":"red"}', "unknown key"),
    ('{"grid":{"n":4096,"m":3}}', "unknown key"),
    ('{"grid":[1]}', "must be an object"),
    ('[1, 2]', "JSON object"),
    ('{"output":""}', "output"),
    ('{"grid":{"L":NaN}}', "grid.L"),
])
def test_rejections(text, needle):
    with pytest.raises(ConfigError, match=needle):
        parse_config(text)


# ------------------------------------------------------------ commands

def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_solve_writes_outputs(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["solve", "--config", write(tmp_path, ELLIPTIC), "--out", str(out)]) == 0
    rows = read_csv(out / "solution.csv")
    assert rows[0] == ["j", "omega", "x", "u_real", "u_imag", "u_prime_weighted"]
    assert len(rows) == 4097
    x = np.array([float(r[2]) for r in rows[1:]])
    u = np.array([float(r[3]) for r in rows[1:]])
    assert np.max(np.abs(u - np.sqrt((1 - x) * (1 + x)))) <= 1e-6
    # (1 - x^2) d/dx sqrt(1 - x^2) = -x sqrt(1 - x^2)
    du = np.array([float(r[5]) for r in rows[1:]])
    inner = np.abs(x) < 0.999
    assert np.max(np.abs(du - (-x * u))[inner]) <= 1e-6
    spec_rows = read_csv(out / "spectrum.csv")
    assert spec_rows[0] == ["k", "xi", "U_real", "U_imag", "multiplier"]
    report = json.loads((out / "report.json").read_text())
    assert {"norms", "bounds", "iterations", "residual", "spectral_tail", "grid"} <= set(report)
    assert report["grid"] == {"n": 4096, "L": 12.0}
    assert all(b["pass"] for b in report["bounds"])
    assert set(report["bounds"][0]) == {"name", "lhs", "rhs", "pass"}
    text = (out / "report.txt").read_text()
    assert "h_half" in text and " NO" not in text


def test_solve_is_deterministic(tmp_path):
    cfg = write(tmp_path, '{"coefficient":{"kind":"triangular","p0":1.0},"rhs":{"kind":"cosine"}}')
    for d in ("a", "b"):
        assert main(["solve", "--config", cfg, "--out", str(tmp_path / d)]) == 0
    for name in ("solution.csv", "spectrum.csv", "report.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_output_dir_from_config(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["solve", "--config", write(tmp_path, '{"output":"here","grid":{"n":512}}')]) == 0
    assert (tmp_path / "here" / "solution.csv").exists()


def test_unwritable_output_is_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["solve", "--config", write(tmp_path, ELLIPTIC), "--out", str(blocker / "sub")]) == 5


def test_missing_config_is_io_error(tmp_path):
    assert main(["solve", "--config", str(tmp_path / "nope.json")]) == 5


def test_bad_config_exit_code(tmp_path, capsys):
    assert main(["solve", "--config", write(tmp_path, '{"grid":{"n":1000}}')]) == 2
    assert "n must be a power of two" in capsys.readouterr().err


def test_convergence_failure_exit_code(tmp_path):
    cfg = write(tmp_path, '{"coefficient":{"kind":"constant"},"solver":{"max_iter":1}}')
    assert main(["solve", "--config", cfg, "--out", str(tmp_path / "o")]) == 3


@pytest.mark.parametrize("name", ["sech", "weight", "odd"])
def test_transform_diagnostics(tmp_path, name):
    cfg = write(tmp_path, '{"grid":{"pad":2}}')
    assert main(["transform", "--function", name, "--config", cfg, "--out", str(tmp_path)]) == 0
    diag = json.loads((tmp_path / "transform.json").read_text())
    assert diag["roundtrip_max_error"] <= 1e-13
    assert diag["parseval_relative_error"] <= 1e-13
    assert diag["forward_max_error"] <= 5e-5
    assert read_csv(tmp_path / "transform.csv")[0] == ["k", "xi", "U_real", "U_imag", "exact_real",
                                                       "exact_imag"]


def test_transform_without_config(tmp_path):
    assert main(["transform", "--out", str(tmp_path)]) == 0


def test_verify_quick(capsys):
    assert main(["verify", "--quick"]) == 0
    out = capsys.readouterr().out
    assert "11/11 checks passed" in out


def test_verify_failure_exit_code(monkeypatch, capsys):
    bad = acceptance.CheckResult(99, "forced", False, 1.0, 0.0)
    monkeypatch.setattr(acceptance, "run_all", lambda quick=False: [bad])
    assert cli.run(RunConfig(command="verify")) == 4
    assert "[FAIL]" in capsys.readouterr().out
