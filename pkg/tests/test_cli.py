import csv
import io
import json

import pytest

from toeplitz_triples.cli import OUTDIR_ENV, dumps, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_json_shape(capsys):
    code, out, _ = run(capsys, "spectrum", "--n", "2", "--cutoff", "6")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"config", "suites"}
    assert doc["config"]["n"] == 2
    (s,) = doc["suites"]
    assert set(s) == {"name", "status", "rows", "metrics"}
    assert s["status"] == "pass"
    assert s["rows"][1] == {"k": 1, "eigenvalue": 0.25, "multiplicity": 2}


def test_output_is_deterministic(capsys):
    a = run(capsys, "berezin", "--n", "1")[1]
    b = run(capsys, "berezin", "--n", "1")[1]
    assert a == b


def test_csv_projection(capsys):
    code, out, _ = run(capsys, "spectrum", "--op", "euler", "--cutoff", "4", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["eigenvalue"] for r in rows] == ["0", "1", "2", "3", "4"]
    assert rows[0]["suite"] == "spectrum:euler"


@pytest.mark.parametrize(
    "argv",
    [
        ("ccr", "--n", "2", "--cutoff", "10"),
        ("sb-check", "--n", "1", "--t", "2"),
        ("weyl", "--n", "2", "--kmax", "20000"),
        ("dixmier", "--n", "1", "--N", "100000"),
        ("verify-triple", "--triple", "bergman-tr"),
        ("symbols", "--trials", "20"),
    ],
)
def test_passing_suites(capsys, argv):
    code, out, _ = run(capsys, *argv)
    doc = json.loads(out)
    assert code == 0, [(s["name"], s["status"]) for s in doc["suites"]]
    assert all(s["status"] == "pass" for s in doc["suites"])


def test_radial_expression(capsys):
    code, out, _ = run(capsys, "spectrum", "--op", "t_radial:r**2", "--cutoff", "3")
    rows = json.loads(out)["suites"][0]["rows"]
    # T_{r^2} on the disc: 2 / ((k+2)(k+3))
    assert [r["eigenvalue"] for r in rows] == pytest.approx([2 / ((k + 2) * (k + 3)) for k in range(4)])
    assert code == 0


def test_failing_suite_sets_exit_code(capsys):
    code, out, _ = run(capsys, "dixmier", "--n", "2", "--N", "10000")
    assert code == 1
    assert json.loads(out)["suites"][0]["status"] == "fail"


def test_numerical_failure_is_reported(capsys):
    code, out, _ = run(capsys, "verify-triple", "--triple", "heisenberg-dirac", "--n", "2", "--cutoffs", "6,8,10,12")
    doc = json.loads(out)
    assert code == 1
    assert any(s["status"] == "error" for s in doc["suites"])
    assert doc["suites"][0]["name"] == "heisenberg-dirac:commutators"


@pytest.mark.parametrize(
    "argv",
    [
        ("spectrum", "--n", "0"),
        ("spectrum", "--m-w", "-1"),
        ("spectrum", "--t", "0"),
        ("spectrum", "--tol", "nonsense=1"),
        ("verify-triple", "--triple", "nope"),
        ("unknown-command",),
    ],
)
def test_invalid_arguments(capsys, argv):
    with pytest.raises(SystemExit) as info:
        main(list(argv))
    assert info.value.code == 2
    assert "error" in capsys.readouterr().err


def test_bad_expression_exits_nonzero(capsys):
    code, _, err = run(capsys, "spectrum", "--op", "t_radial:foo*rho")
    assert code == 2
    assert "foo" in err


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nn = 3\ncutoff = 4\nformat = csv\n")
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg), "--cutoff", "2")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["multiplicity"] for r in rows] == ["1", "3", "6"]
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    with pytest.raises(SystemExit):
        main(["spectrum", "--config", str(bad)])


def test_output_directory_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUTDIR_ENV, str(tmp_path))
    code, out, _ = run(capsys, "weyl", "--kmax", "5000", "--output", "w.json")
    assert code == 0 and out == ""
    doc = json.loads((tmp_path / "w.json").read_text())
    assert doc["suites"][0]["name"] == "weyl:t_r"


def test_float_formatting():
    text = dumps({"a": 0.1, "b": [1.0, float("nan")], "c": True})
    assert "0.10000000000000001" in text
    assert '"nan"' in text
    assert json.loads(text)["c"] is True
