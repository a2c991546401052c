import json

import jsonschema
import numpy as np
import pytest

from supportfactor.bundles import EXAMPLE_NAMES
from supportfactor.cli import main
from supportfactor.reporting import load_schema

SCHEMA = load_schema()


def _run(tmp_path, *args):
    out = tmp_path / "out"
    code = main([*args, "--out", str(out)])
    return code, out


def test_check_builtin_writes_valid_report(tmp_path, capsys):
    code, out = _run(tmp_path, "check", "--builtin", "darts-uniform", "--grid", "128")
    assert code == 0
    doc = json.loads((out / "check.json").read_text())
    jsonschema.validate(doc, SCHEMA)
    assert doc["verdict"]["screening"] == "DependentBySupport"
    assert json.loads(capsys.readouterr().out) == doc
    assert (out / "support_xy.pgm").exists()


def test_reports_are_byte_identical(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert main(["check", "--builtin", "example7", "--grid", "64", "--out", str(a)]) == 0
    assert main(["check", "--builtin", "example7", "--grid", "64", "--out", str(b)]) == 0
    assert (a / "check.json").read_bytes() == (b / "check.json").read_bytes()


def test_support_univariate(tmp_path):
    code, out = _run(tmp_path, "support", "--builtin", "cantor(6)")
    assert code == 0
    doc = json.loads((out / "support.json").read_text())
    jsonschema.validate(doc, SCHEMA)
    assert doc["support"]["kind"] == "univariate"


def test_table_and_samples(tmp_path):
    t = tmp_path / "t.csv"
    t.write_text("x,y,p\n0,0,0.5\n1,1,0.5\n")
    code, out = _run(tmp_path, "check", "--table", str(t))
    assert code == 0
    assert json.loads((out / "check.json").read_text())["verdict"]["screening"] == "DependentBySupport"
    s = tmp_path / "s.csv"
    np.savetxt(s, np.random.default_rng(0).random((2000, 2)), delimiter=",")
    code, out = _run(tmp_path, "check", "--samples", str(s), "--grid", "16")
    assert code == 0
    assert json.loads((out / "check.json").read_text())["verdict"]["screening"] == "Inconclusive"


@pytest.mark.parametrize(
    "args, code",
    [
        (["check", "--builtin", "nope"], 2),
        (["support", "--builtin", "normal", "--grid", "8"], 2),
        (["check", "--builtin", "cantor(5)"], 2),
        (["check", "--builtin", "darts-uniform", "--tol-area", "-1"], 2),
        (["example", "nope"], 2),
    ],
)
def test_input_errors_exit_2(tmp_path, args, code):
    assert main([*args, "--out", str(tmp_path)]) == code


def test_bad_distribution_exits_3(tmp_path):
    t = tmp_path / "t.csv"
    t.write_text("x,y,p\n0,0,0.5\n1,1,0.4\n")
    assert main(["check", "--table", str(t), "--out", str(tmp_path)]) == 3


def test_argparse_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["check"])
    assert exc.value.code == 2


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SUPPORTFACTOR_OUT", str(tmp_path / "env"))
    assert main(["support", "--builtin", "uniform", "--grid", "32"]) == 0
    assert (tmp_path / "env" / "support.json").exists()


@pytest.mark.parametrize("name", [n for n in EXAMPLE_NAMES if n != "example9"])
def test_examples_produce_valid_bundles(tmp_path, name):
    assert main(["example", name, "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / name / "report.json").read_text())
    jsonschema.validate(doc, SCHEMA)
    assert (tmp_path / name / "summary.txt").exists()
    if name != "cantor":
        assert all(c["agrees"] for c in doc["comparisons"])
